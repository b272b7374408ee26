# CVNN Bench - Source Package
