# Tests for PrCCSL toolkit
