# Weighted linear algebra
