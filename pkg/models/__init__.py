# Domain models package
