"""Monte Carlo experiment drivers"""
