# Specification language module for PrCCSL toolkit
