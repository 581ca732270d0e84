"""Named materials and the perfect-crystal upper-limit configuration."""

from __future__ import annotations

from dataclasses import dataclass

from casimir.dielectric import DrudeModel, DrudeParams, IdealMetal
from casimir.errors import InputError
from casimir.lifshitz import LayerStack

UOHM_CM = 1e-8  # Ohm m


def _limit(omega_p, rho_uohm_cm):
    return DrudeParams.from_resistivity(omega_p, rho_uohm_cm * UOHM_CM)


# Perfect-crystal parameters: plasma frequency from one free electron per
# Au atom, three per Al atom, and Au 1 + Pd 2 for the alloy; static
# resistivities of the bulk crystals.
AU_LIMIT = _limit(1.37e16, 2.25)
AL_LIMIT = _limit(2.40e16, 2.65)
AUPD_LIMIT = _limit(1.69e16, 30.0)

# Drude fits of handbook data, lambda > 2 um: (omega_p, omega_tau, rho_0 in uOhm cm).
# Starred (film) samples are Al 1 and Al 4.
HANDBOOK_FITS = {
    "al-1": (1.54e16, 15.5e13, 7.39),
    "al-2": (2.235e16, 12.49e13, 2.83),
    "al-3": (2.43e16, 14.4e13, 2.76),
    "al-4": (1.63e16, 18.2e13, 7.74),
    "au-1": (1.280e16, 3.29e13, 2.27),
    "au-2": (1.372e16, 4.060e13, 2.44),
    "au-3": (1.34e16, 7.08e13, 4.46),
    "au-4": (1.051e16, 6.24e13, 6.40),
}

MATERIALS = {
    "au-limit": DrudeModel(AU_LIMIT),
    "al-limit": DrudeModel(AL_LIMIT),
    "aupd-limit": DrudeModel(AUPD_LIMIT),
    "ideal": IdealMetal(),
}
MATERIALS.update({f"{k}-table": DrudeModel(DrudeParams(wp, wt))
                  for k, (wp, wt, _) in HANDBOOK_FITS.items()})


def material(name):
    try:
        return MATERIALS[name]
    except KeyError:
        raise InputError(f"unknown material {name!r}; known: {', '.join(sorted(MATERIALS))}") from None


@dataclass(frozen=True)
class UpperLimitPreset:
    """Coatings for the two experiment families.

    The torsion-pendulum bodies carry thick Au (treated as semi-infinite);
    the AFM bodies carry Al under a thin Au/Pd film of thickness ``h``.
    """

    au: DrudeParams = AU_LIMIT
    al: DrudeParams = AL_LIMIT
    aupd: DrudeParams = AUPD_LIMIT
    h: float = 15e-9

    def tp_stack(self):
        return LayerStack.homogeneous(DrudeModel(self.au))

    def afm_stack(self):
        return LayerStack.coated(DrudeModel(self.al), DrudeModel(self.aupd), self.h)

    def afm_uncoated_stack(self):
        return LayerStack.homogeneous(DrudeModel(self.al))

    def stack(self, experiment="afm"):
        if experiment == "afm":
            return self.afm_stack()
        if experiment == "tp":
            return self.tp_stack()
        raise InputError(f"unknown experiment {experiment!r}; use afm or tp")


PRESETS = {"paper-upper-limit": UpperLimitPreset()}


def preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise InputError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
