# Query strategies and local approximators package
