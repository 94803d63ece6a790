# Verification and rate measurement package
