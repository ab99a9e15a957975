"""
Module de la correspondance entre attaques et capacités.

Ce module contient l'ensemble des capacités installé par chaque attaque et le programme embarqué dans
l'image malveillante correspondante.
"""

from typing import Optional

from bctrl import Capability, PatchSet, PayloadKind
from config import Attack

DES_BASE: frozenset[Capability] = frozenset({Capability.DFU, Capability.MUB, Capability.MIB})

ATTACK_CAPABILITIES: dict[Attack, frozenset[Capability]] = {
    Attack.UBR: frozenset(Capability),
    Attack.UTI: frozenset({Capability.DFU, Capability.MUB, Capability.MIB, Capability.CBA}),
    Attack.DES1: DES_BASE,
    Attack.DES2: DES_BASE,
    Attack.DES3: DES_BASE,
    Attack.DES4: DES_BASE,
    Attack.DES5: DES_BASE | {Capability.DBC},
    Attack.DES6: DES_BASE,
    Attack.DES7: DES_BASE | {Capability.FBD},
    Attack.PLR: frozenset({Capability.DFU, Capability.MUB, Capability.CBA}),
}
"""Les capacités installées par attaque."""

ATTACK_PAYLOADS: dict[Attack, PayloadKind] = {
    Attack.UBR: PayloadKind.UBR,
    Attack.UTI: PayloadKind.UTI,
    Attack.DES1: PayloadKind.DES1,
    Attack.DES2: PayloadKind.DES2,
    Attack.DES3: PayloadKind.DES3,
    Attack.DES4: PayloadKind.DES4,
    Attack.DES5: PayloadKind.DES5,
    Attack.DES6: PayloadKind.DES6,
    Attack.DES7: PayloadKind.DES7,
    Attack.PLR: PayloadKind.PLR,
}


def patch_set_for(attack: Attack, capabilities: Optional[frozenset[Capability]] = None) -> PatchSet:
    """
    Retourne l'ensemble de modifications d'une attaque.

    :param attack: L'attaque.
    :type attack: Attack
    :param capabilities: Un ensemble imposé (ex. réduit pour un essai), sinon celui de l'attaque.
    :type capabilities: Optional[frozenset[Capability]]
    :return: L'ensemble de modifications.
    :rtype: PatchSet
    :raises KeyError: Si l'attaque n'installe aucune image.
    """
    return PatchSet.from_capabilities(ATTACK_CAPABILITIES[attack] if capabilities is None else capabilities)
