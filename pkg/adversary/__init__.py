# Lower-bound harness package
