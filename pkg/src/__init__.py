# Discrete div-curl toolkit
