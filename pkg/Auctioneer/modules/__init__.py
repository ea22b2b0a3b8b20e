from .Distribution import *
from .Myerson import *
from .Revenue import *
from .Rounding import *
from .Simple import *
from .Environment import *
from .SPRounding import *
from .Learn import *
from .Iid import *
