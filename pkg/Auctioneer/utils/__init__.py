from .errors import *
from .files import *
from .version import *
