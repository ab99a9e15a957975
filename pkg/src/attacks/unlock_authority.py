"""
Module du service de déverrouillage de l'attaquant.

Ce module contient le registre des codes de déverrouillage par numéro de série DRV : le code est
enregistré à la création de l'image malveillante et n'est délivré qu'après le paiement simulé.
"""

from dataclasses import dataclass, field

from loguru import logger

from .exception_attacks import PaymentRequiredError, UnknownSerialError

LOGGER = logger.bind(name="BES-Simulation.Attacks.UnlockAuthority")

UNLOCK_CODE_SIZE: int = 16


@dataclass
class UnlockRecord:
    unlock_code: bytes
    """Le code de 128 bits stocké dans l'image malveillante."""
    paid: bool = False


@dataclass
class UnlockAuthority:
    """
    Registre des codes de déverrouillage.
    """

    records: dict[bytes, UnlockRecord] = field(default_factory=dict)
    """Les enregistrements par numéro de série DRV."""

    def register(self, serial: bytes, unlock_code: bytes) -> None:
        """
        Enregistre le code d'une trottinette ciblée.

        :param serial: Le numéro de série DRV.
        :type serial: bytes
        :param unlock_code: Le code de 16 octets.
        :type unlock_code: bytes
        :raises ValueError: Si le code n'a pas 16 octets.
        """
        if len(unlock_code) != UNLOCK_CODE_SIZE:
            raise ValueError("Le code de déverrouillage doit contenir 16 octets.")

        self.records[bytes(serial)] = UnlockRecord(unlock_code=bytes(unlock_code))
        LOGGER.debug(f"Code de déverrouillage enregistré pour {serial.hex()}.")

    def _record(self, serial: bytes) -> UnlockRecord:
        try:
            return self.records[bytes(serial)]
        except KeyError as error:
            raise UnknownSerialError(serial=bytes(serial)) from error

    def simulate_payment(self, serial: bytes) -> None:
        """
        Marque la rançon d'une trottinette comme payée.

        :param serial: Le numéro de série DRV.
        :type serial: bytes
        :raises UnknownSerialError: Si le numéro de série n'est pas enregistré.
        """
        self._record(serial).paid = True
        LOGGER.info(f"Paiement simulé pour {serial.hex()}.")

    def unlock_firmware(self, serial: bytes) -> bytes:
        """
        Délivre le code de déverrouillage d'une trottinette dont la rançon est payée.

        :param serial: Le numéro de série DRV.
        :type serial: bytes
        :return: Le code de 16 octets.
        :rtype: bytes
        :raises UnknownSerialError: Si le numéro de série n'est pas enregistré.
        :raises PaymentRequiredError: Si la rançon n'est pas payée.
        """
        record = self._record(serial)

        if not record.paid:
            raise PaymentRequiredError(serial=bytes(serial))

        return record.unlock_code
