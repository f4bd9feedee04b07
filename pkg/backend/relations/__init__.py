# Relations module for PrCCSL toolkit
