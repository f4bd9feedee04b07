# PrCCSL Toolkit Backend
