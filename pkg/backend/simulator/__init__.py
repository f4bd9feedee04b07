# Simulator module for PrCCSL toolkit
