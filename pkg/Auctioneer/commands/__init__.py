from .Cli import *
from .Command import *
from .UseConfig import *
from .RunConfig import *
from .Artifacts import *
from .Fixtures import *
from .LearnCommand import *
from .EvalCommand import *
from .RoundCommand import *
from .VerifyCommand import *
from .ReproCommand import *
from .Main import *
