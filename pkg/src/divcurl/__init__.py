# Div-curl experiments
