# Statistical model checking module for PrCCSL toolkit
