# Short sequences and Hodge decompositions
