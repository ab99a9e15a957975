"""
Module du matériel cryptographique des micrologiciels.

Ce module contient les clés TEA par cible et la paire de clés ECDSA du fabricant, dérivées des flux
pseudo-aléatoires du scénario. Seule la clé TEA du DRV a fuité : c'est la vue de l'attaquant.
"""

from dataclasses import dataclass, field
from typing import Optional

from cryptography.hazmat.primitives.asymmetric import ec

from simkern import RandomStreams

from .image import FirmwareTarget
from .tea import KEY_SIZE

SECP256R1_ORDER: int = 0xFFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551


@dataclass(frozen=True)
class KeyMaterial:
    """
    Clés de l'écosystème.
    """

    tea_keys: dict[FirmwareTarget, bytes]
    """Les clés TEA par cible."""
    public_key: ec.EllipticCurvePublicKey
    """La clé publique de vérification, connue de tous les nœuds."""
    private_key: Optional[ec.EllipticCurvePrivateKey] = field(default=None, repr=False)
    """La clé privée de signature, réservée au fabricant."""

    def tea_key(self, target: FirmwareTarget) -> Optional[bytes]:
        return self.tea_keys.get(target)

    @property
    def can_sign(self) -> bool:
        return self.private_key is not None

    def attacker_view(self) -> "KeyMaterial":
        """
        Retourne les clés connues de l'attaquant : la clé publique et la clé TEA du DRV ayant fuité.

        :return: Les clés de l'attaquant.
        :rtype: KeyMaterial
        """
        return KeyMaterial(
            tea_keys={FirmwareTarget.DRV: self.tea_keys[FirmwareTarget.DRV]}, public_key=self.public_key
        )


def generate_key_material(streams: RandomStreams) -> KeyMaterial:
    """
    Dérive les clés du fabricant.

    :param streams: Les flux pseudo-aléatoires du scénario.
    :type streams: RandomStreams
    :return: Le matériel cryptographique complet.
    :rtype: KeyMaterial
    """
    scalar = int.from_bytes(streams.random_bytes("vendor-ecdsa", 32), "big") % (SECP256R1_ORDER - 1) + 1
    private_key = ec.derive_private_key(scalar, ec.SECP256R1())

    return KeyMaterial(
        tea_keys={target: streams.random_bytes(f"tea:{target.name}", KEY_SIZE) for target in FirmwareTarget},
        public_key=private_key.public_key(),
        private_key=private_key,
    )
