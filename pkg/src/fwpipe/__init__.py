"""
Ce package contient la chaîne des micrologiciels : chiffrement TEA (C1), signature ECDSA (C2), format
d'image, politique de signature par modèle et décision d'installation.
"""

from .exception_fwpipe import DecryptFailedError, ImageFormatError
from .image import FirmwareImage, FirmwareTarget, ImageFlags, compute_body_crc, parse_version, read_image, write_image
from .install import InstallDecision, RejectReason, decrypt_body, verify_and_install
from .keys import KeyMaterial, generate_key_material
from .policy import PolicyRule, SigningPolicy, VULNERABLE_POLICY, build_signing_policy
from .signing import ecdsa_sign, ecdsa_verify
from .tea import tea_decrypt, tea_encrypt
from .vendor import release_image, seal_image

__all__ = [
    "DecryptFailedError",
    "FirmwareImage",
    "FirmwareTarget",
    "ImageFlags",
    "ImageFormatError",
    "InstallDecision",
    "KeyMaterial",
    "PolicyRule",
    "RejectReason",
    "SigningPolicy",
    "VULNERABLE_POLICY",
    "build_signing_policy",
    "compute_body_crc",
    "decrypt_body",
    "ecdsa_sign",
    "ecdsa_verify",
    "generate_key_material",
    "parse_version",
    "read_image",
    "release_image",
    "seal_image",
    "tea_decrypt",
    "tea_encrypt",
    "verify_and_install",
    "write_image",
]
