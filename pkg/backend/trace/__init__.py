# Trace module for PrCCSL toolkit
