# Air taxi demand forecaster
