# Clock expression module for PrCCSL toolkit
