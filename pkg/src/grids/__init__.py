# Discrete complexes on grids
