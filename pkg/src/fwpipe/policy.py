"""
Module de la politique de signature des micrologiciels.

Ce module contient la matrice (profil, cible) des exigences de signature et de chiffrement telle
qu'observée sur les modèles vulnérables, et son extension au BCTRL par les contre-mesures C1 et C2.
"""

from dataclasses import dataclass

from config import Countermeasure, Profile

from .image import FirmwareTarget, parse_version

ALWAYS: str = "0.0.0"


@dataclass(frozen=True)
class PolicyRule:
    """
    Exigences d'installation pour une cible.
    """

    require_signature: bool = False
    """Une signature valide du fabricant est exigée."""
    require_encryption: bool = False
    """Le corps doit être chiffré."""
    since_version: str = ALWAYS
    """La version installée à partir de laquelle la règle s'applique."""

    def active(self, installed_version: str) -> bool:
        """
        Indique si la règle s'applique compte tenu de la version installée sur le nœud.

        :param installed_version: La version installée.
        :type installed_version: str
        :return: Vrai si la version installée est au moins ``since_version``.
        :rtype: bool
        """
        return parse_version(installed_version) >= parse_version(self.since_version)


UNPROTECTED: PolicyRule = PolicyRule()

VULNERABLE_POLICY: dict[tuple[Profile, FirmwareTarget], PolicyRule] = {
    (Profile.M365, FirmwareTarget.BTS): UNPROTECTED,
    (Profile.M365, FirmwareTarget.DRV): UNPROTECTED,
    (Profile.M365, FirmwareTarget.BCTRL): UNPROTECTED,
    (Profile.ES3, FirmwareTarget.BTS): PolicyRule(require_signature=True, since_version="1.5.2"),
    (Profile.ES3, FirmwareTarget.DRV): PolicyRule(
        require_signature=True, require_encryption=True, since_version="0.1.7"
    ),
    (Profile.ES3, FirmwareTarget.BCTRL): UNPROTECTED,
}
"""Les exigences relevées sur les micrologiciels d'origine."""


@dataclass(frozen=True)
class SigningPolicy:
    """
    Politique complète d'un scénario.
    """

    rules: dict[tuple[Profile, FirmwareTarget], PolicyRule]
    """Les règles par (profil, cible)."""

    def rule(self, profile: Profile, target: FirmwareTarget) -> PolicyRule:
        return self.rules[(profile, target)]

    def effective(self, profile: Profile, target: FirmwareTarget, installed_version: str) -> PolicyRule:
        """
        Retourne la règle effective : la règle si elle s'applique à la version installée, sinon aucune
        exigence.

        :param profile: Le profil.
        :type profile: Profile
        :param target: La cible.
        :type target: FirmwareTarget
        :param installed_version: La version installée sur la cible.
        :type installed_version: str
        :return: La règle effective.
        :rtype: PolicyRule
        """
        rule = self.rule(profile, target)

        return rule if rule.active(installed_version) else UNPROTECTED


def build_signing_policy(countermeasures: frozenset[Countermeasure]) -> SigningPolicy:
    """
    Construit la politique d'un scénario : C1 exige le chiffrement et C2 la signature du BCTRL.

    :param countermeasures: Les contre-mesures actives.
    :type countermeasures: frozenset[Countermeasure]
    :return: La politique.
    :rtype: SigningPolicy
    """
    rules = dict(VULNERABLE_POLICY)

    for profile in Profile:
        current = rules[(profile, FirmwareTarget.BCTRL)]
        rules[(profile, FirmwareTarget.BCTRL)] = PolicyRule(
            require_signature=current.require_signature or Countermeasure.C2 in countermeasures,
            require_encryption=current.require_encryption or Countermeasure.C1 in countermeasures,
            since_version=ALWAYS,
        )

    return SigningPolicy(rules=rules)
