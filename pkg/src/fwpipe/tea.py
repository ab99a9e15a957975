"""
Module du chiffrement TEA.

Ce module contient le chiffrement par blocs TEA (32 cycles, clé de 128 bits, blocs de 64 bits en mots
gros-boutistes) appliqué bloc par bloc à un corps de micrologiciel complété par des zéros et suivi d'un
bloc de longueur.
"""

import struct

from .exception_fwpipe import DecryptFailedError

BLOCK_SIZE: int = 8
KEY_SIZE: int = 16
ROUNDS: int = 32
DELTA: int = 0x9E3779B9
MASK: int = 0xFFFFFFFF


def _key_words(key: bytes) -> tuple[int, int, int, int]:
    if len(key) != KEY_SIZE:
        raise ValueError("La clé TEA doit contenir 16 octets.")

    return struct.unpack(">4I", key)


def encrypt_block(block: bytes, key: bytes) -> bytes:
    """
    Chiffre un bloc de 8 octets.

    :param block: Le bloc en clair.
    :type block: bytes
    :param key: La clé de 16 octets.
    :type key: bytes
    :return: Le bloc chiffré.
    :rtype: bytes
    """
    k0, k1, k2, k3 = _key_words(key)
    v0, v1 = struct.unpack(">2I", block)
    total = 0

    for _ in range(ROUNDS):
        total = (total + DELTA) & MASK
        v0 = (v0 + ((((v1 << 4) + k0) & MASK) ^ ((v1 + total) & MASK) ^ (((v1 >> 5) + k1) & MASK))) & MASK
        v1 = (v1 + ((((v0 << 4) + k2) & MASK) ^ ((v0 + total) & MASK) ^ (((v0 >> 5) + k3) & MASK))) & MASK

    return struct.pack(">2I", v0, v1)


def decrypt_block(block: bytes, key: bytes) -> bytes:
    """
    Déchiffre un bloc de 8 octets.

    :param block: Le bloc chiffré.
    :type block: bytes
    :param key: La clé de 16 octets.
    :type key: bytes
    :return: Le bloc en clair.
    :rtype: bytes
    """
    k0, k1, k2, k3 = _key_words(key)
    v0, v1 = struct.unpack(">2I", block)
    total = (DELTA * ROUNDS) & MASK

    for _ in range(ROUNDS):
        v1 = (v1 - ((((v0 << 4) + k2) & MASK) ^ ((v0 + total) & MASK) ^ (((v0 >> 5) + k3) & MASK))) & MASK
        v0 = (v0 - ((((v1 << 4) + k0) & MASK) ^ ((v1 + total) & MASK) ^ (((v1 >> 5) + k1) & MASK))) & MASK
        total = (total - DELTA) & MASK

    return struct.pack(">2I", v0, v1)


def pad(data: bytes) -> bytes:
    """
    Complète les données par des zéros jusqu'à un multiple de 8 octets et ajoute la longueur d'origine.

    :param data: Les données.
    :type data: bytes
    :return: Les données complétées.
    :rtype: bytes
    """
    padding = (-len(data)) % BLOCK_SIZE

    return data + bytes(padding) + struct.pack(">Q", len(data))


def unpad(data: bytes) -> bytes:
    """
    Retire le complément. Une longueur incohérente (clé erronée) conserve toutes les données sans le
    bloc de longueur, afin que l'erreur soit détectée par le CRC du corps.

    :param data: Les données complétées.
    :type data: bytes
    :return: Les données d'origine.
    :rtype: bytes
    """
    (length,) = struct.unpack(">Q", data[-BLOCK_SIZE:])
    body = data[:-BLOCK_SIZE]

    if length > len(body) or len(body) - length >= BLOCK_SIZE:
        return body

    return body[:length]


def tea_encrypt(key: bytes, data: bytes) -> bytes:
    """
    Chiffre des données bloc par bloc.

    :param key: La clé de 16 octets.
    :type key: bytes
    :param data: Les données en clair.
    :type data: bytes
    :return: Les données chiffrées (longueur multiple de 8).
    :rtype: bytes
    """
    padded = pad(data)

    return b"".join(encrypt_block(padded[i : i + BLOCK_SIZE], key) for i in range(0, len(padded), BLOCK_SIZE))


def tea_decrypt(key: bytes, data: bytes) -> bytes:
    """
    Déchiffre des données bloc par bloc.

    :param key: La clé de 16 octets.
    :type key: bytes
    :param data: Les données chiffrées.
    :type data: bytes
    :return: Les données en clair.
    :rtype: bytes
    :raises DecryptFailedError: Si la longueur n'est pas un multiple non nul de 8.
    """
    if len(data) < BLOCK_SIZE or len(data) % BLOCK_SIZE:
        raise DecryptFailedError(length=len(data))

    plain = b"".join(decrypt_block(data[i : i + BLOCK_SIZE], key) for i in range(0, len(data), BLOCK_SIZE))

    return unpad(plain)
