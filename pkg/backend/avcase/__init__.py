# Autonomous vehicle case study for PrCCSL toolkit
