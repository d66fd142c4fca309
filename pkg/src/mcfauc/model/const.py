SUBJECT_COLUMNS = ("id", "arm", "followup", "terminal")
EVENT_COLUMNS = ("id", "time")

ESTIMANDS = ("difference", "ratio")
ESTIMAND_CHOICES = ("difference", "ratio", "both")
ENDPOINTS = ("auc", "rmst")
RMST_WEIGHTS = ("survival", "at_risk")

TREATED = 1
CONTROL = 0

DEFAULT_ALPHA = 0.05
