# Models module for PrCCSL toolkit
