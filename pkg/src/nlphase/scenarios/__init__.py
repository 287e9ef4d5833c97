"""Scenario files shipped with the package."""
from importlib import resources

__all__ = ('bundled_scenarios', 'scenario_path')


def bundled_scenarios():
    """Names of the bundled ``.ini`` files, without extension."""
    return sorted(p.name[:-4] for p in resources.files(__name__).iterdir()
                  if p.name.endswith('.ini'))


def scenario_path(name):
    """Filesystem path of a bundled scenario."""
    return str(resources.files(__name__) / (name + '.ini'))
