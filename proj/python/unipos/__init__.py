"""Universal POS tagset mapping, trigram HMM tagging and DMV grammar induction."""

from ._unipos import *  # noqa: F401,F403
from ._unipos import __version__  # noqa: F401
