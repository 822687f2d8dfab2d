from .models import MetricsReport
from .reductions import avg_interference, interference_reduction_gain, min_rate, outage, sinr_cdf
