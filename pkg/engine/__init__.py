# Bisect and Approximate engine package
