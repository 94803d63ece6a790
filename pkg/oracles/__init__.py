# Black-box oracles and test functions package
