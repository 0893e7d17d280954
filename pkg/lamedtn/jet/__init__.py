"""
Truncated multivariate Taylor arithmetic (jets) and matrices of jets
"""

from lamedtn.jet.multiindex import *
from lamedtn.jet.series import *
from lamedtn.jet.space import *
from lamedtn.jet.matrix import *
