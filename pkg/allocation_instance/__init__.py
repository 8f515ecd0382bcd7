from .allocation import Allocation, Provenance
from .instance import Instance, Mode, bundle_value, generate, load_instance, save_instance
