"""
Spec Grammar
Lark (LALR) grammar of .prccsl specification files
"""

SPEC_GRAMMAR = r'''
start: statement*

?statement: clock_decl
    | definition
    | wcet_decl
    | constraint
    | query

clock_decl: "clock" NAME ("," NAME)*
definition: "let" NAME "=" expr
wcet_decl: "wcet" NAME "=" NUMBER

constraint: [label] (template | relation)
label: NAME ":"

relation: expr rel_kind expr [prob]

rel_kind: "subclock" -> subclock
    | "coincides" -> coincides
    | "excludes" -> excludes
    | "causes" -> causes
    | "precedes" -> precedes

template: "periodic" NAME "period" NUMBER [multiple] [on_ref] [prob] -> periodic
    | "execution" "from" NAME "to" NAME "within" interval [on_ref] [prob] -> execution
    | "e2e" "from" NAME "to" NAME "within" window [on_ref] [prob] -> e2e
    | "sporadic" "from" NAME "to" NAME "gap" NUMBER [on_ref] [prob] -> sporadic
    | "sync" NAME ("," NAME)+ "tolerance" NUMBER [on_ref] [prob] -> sync
    | "comparison" "from" NAME "bound" NUMBER "wcet" wcet_sum [on_ref] [prob] -> comparison
    | "exclusion" NAME "," NAME [prob] -> exclusion

multiple: "multiple" "of" NAME
interval: "[" NUMBER "," NUMBER "]"
?window: interval
    | NUMBER -> upper_only
on_ref: "on" NAME
prob: "prob" (NUMBER | RATIO)
wcet_sum: wcet_term ("+" wcet_term)*
?wcet_term: NAME | NUMBER

?expr: NAME -> named
    | "{" "periodicOn" expr "period" NUMBER "}" -> periodic_on
    | "{" expr "delayFor" NUMBER "on" expr "}" -> delay_for
    | "inf" "(" expr ("," expr)+ ")" -> inf
    | "sup" "(" expr ("," expr)+ ")" -> sup
    | "(" expr ")"

query: "query" NAME ":" qbody

?qbody: "hypothesis" prop "bound" NUMBER hopt* -> hypothesis
    | "estimate" prop "bound" NUMBER eopt* -> estimate
    | "compare" prop "bound" NUMBER "with" prop "bound" NUMBER "ratio" NUMBER -> compare
    | "expect" extremum term "bound" NUMBER [runs] -> expect
    | "simulate" "runs" NUMBER "bound" NUMBER "{" term ("," term)* "}" -> simulate
    | "ensemble" NAME "bound" NUMBER [runs] -> ensemble

runs: "runs" NUMBER

hopt: "threshold" NUMBER -> opt_threshold
    | "alpha" NUMBER -> opt_alpha
    | "beta" NUMBER -> opt_beta
    | "delta" NUMBER -> opt_delta
    | "runs" NUMBER -> opt_runs

eopt: "confidence" NUMBER -> opt_confidence
    | "epsilon" NUMBER -> opt_epsilon
    | "method" METHOD -> opt_method

extremum: "max" -> ext_max
    | "min" -> ext_min

?prop: NAME -> prop_ref
    | "[]" pred -> always
    | "<>" pred -> eventually

?pred: pred_and
    | pred "or" pred_and -> or_
?pred_and: pred_not
    | pred_and "and" pred_not -> and_
?pred_not: "not" pred_not -> not_
    | pred_atom
?pred_atom: term cmp_op term -> compare_terms
    | term
    | "(" pred ")"

cmp_op: ">=" -> ge
    | "<=" -> le
    | ">" -> gt
    | "<" -> lt
    | "==" -> eq
    | "!=" -> ne

?term: factor
    | term "+" factor -> add
    | term "-" factor -> sub
?factor: NUMBER -> const
    | "h" "(" expr ")" -> hist
    | "tick" "(" expr ")" -> tick
    | "elapsed" "(" expr ")" -> elapsed
    | "at" "(" NAME "," NAME ")" -> at
    | NAME -> var

METHOD.2: /(clopper-pearson|chernoff)\b/
NAME: /[A-Za-z_][A-Za-z0-9_]*/
RATIO.2: /\d+\/\d+/
NUMBER: /\d+(\.\d+)?/
COMMENT: /#[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
'''
