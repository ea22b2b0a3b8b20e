from .modules import *
from .stores import *
from .utils import *
from .commands import *
