"""
Module du moniteur de batterie (BMON).

Ce module contient le fichier de registres du BMON, son point d'accès I2C esclave et la vérification des
protections matérielles. La disposition des registres reprend celle d'un frontal analogique de la famille
bq769x0 : état système, équilibrage, contrôle, seuils de déclenchement, tensions des cellules et courant.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional

from loguru import logger

from simkern import EventKind, EventLog
from .battery_pack import BatteryPack
from .exception_battery import I2cTimeoutError, UnknownRegisterError
from .pack_models import CELL_GROUPS, Thresholds

LOGGER = logger.bind(name="BES-Simulation.Battery.Bmon")

NODE_NAME: str = "BMON"

UV_TRIP_RANGE_MV: tuple[int, int] = (1580, 2750)
"""La plage admissible du seuil de sous-tension matériel."""
OV_TRIP_RANGE_MV: tuple[int, int] = (4200, 4700)
"""La plage admissible du seuil de surtension matériel."""

SYS_STAT_OV: int = 0x04
SYS_STAT_UV: int = 0x08
SYS_CTRL1_SHIP: int = 0x03
SYS_CTRL2_CHG_ON: int = 0x01
SYS_CTRL2_DSG_ON: int = 0x02
CELLBAL_BITS: int = 5
"""Le nombre de groupes couverts par un registre CELLBAL."""
REGISTER_MASK: int = 0xFFFF


class Register(IntEnum):
    """
    Adresses des registres du BMON.
    """

    SYS_STAT = 0x00
    CELLBAL1 = 0x01
    CELLBAL2 = 0x02
    CELLBAL3 = 0x03
    SYS_CTRL1 = 0x04
    SYS_CTRL2 = 0x05
    OV_TRIP = 0x09
    UV_TRIP = 0x0A
    VC1 = 0x0C
    VC2 = 0x0E
    VC3 = 0x10
    VC4 = 0x12
    VC5 = 0x14
    VC6 = 0x16
    VC7 = 0x18
    VC8 = 0x1A
    VC9 = 0x1C
    VC10 = 0x1E
    CC = 0x32


VC_REGISTERS: tuple[Register, ...] = tuple(Register[f"VC{index}"] for index in range(1, CELL_GROUPS + 1))
READ_ONLY_REGISTERS: frozenset[Register] = frozenset(VC_REGISTERS) | {Register.CC}
CELLBAL_REGISTERS: tuple[Register, ...] = (Register.CELLBAL1, Register.CELLBAL2, Register.CELLBAL3)


class I2cOperation(IntEnum):
    """
    Sens d'un accès I2C.
    """

    READ = 0
    WRITE = 1


@dataclass(frozen=True)
class I2cMessage:
    """
    Message I2C du BCTRL (maître unique) vers le BMON.
    """

    reg_addr: int
    """L'adresse du registre."""
    value: int = 0
    """La valeur 16 bits écrite (ignorée en lecture)."""
    rw: I2cOperation = I2cOperation.READ
    """Le sens de l'accès."""

    def __post_init__(self) -> None:
        if not 0 <= self.value <= REGISTER_MASK:
            raise ValueError("La valeur d'un registre du BMON est codée sur 16 bits.")

    @classmethod
    def read(cls, reg_addr: int) -> "I2cMessage":
        return cls(reg_addr=reg_addr)

    @classmethod
    def write(cls, reg_addr: int, value: int) -> "I2cMessage":
        return cls(reg_addr=reg_addr, value=value, rw=I2cOperation.WRITE)


@dataclass(frozen=True)
class FaultFlags:
    """
    Indicateurs de défaut matériel du BMON.
    """

    under_trip: bool = False
    """Un groupe est sous UV_TRIP."""
    over_trip: bool = False
    """Un groupe est au-dessus de OV_TRIP."""

    @property
    def any(self) -> bool:
        return self.under_trip or self.over_trip

    def to_sys_stat(self) -> int:
        return (SYS_STAT_UV if self.under_trip else 0) | (SYS_STAT_OV if self.over_trip else 0)

    @classmethod
    def from_sys_stat(cls, value: int) -> "FaultFlags":
        return cls(under_trip=bool(value & SYS_STAT_UV), over_trip=bool(value & SYS_STAT_OV))


@dataclass
class BmonRegisters:
    """
    Fichier de registres du BMON. Les registres VC et CC sont des miroirs calculés à partir du pack au
    moment de la lecture.
    """

    pack: BatteryPack
    """Le pack mesuré."""
    uv_trip: int = Thresholds().d_uvt
    """Le seuil de sous-tension matériel."""
    ov_trip: int = Thresholds().d_ovt
    """Le seuil de surtension matériel."""
    cellbal: list[int] = field(default_factory=lambda: [0, 0, 0])
    """Les trois registres d'équilibrage."""
    sys_ctrl1: int = 0
    """Le registre de contrôle 1 (mode SHIP)."""
    sys_ctrl2: int = SYS_CTRL2_CHG_ON | SYS_CTRL2_DSG_ON
    """Le registre de contrôle 2 (sorties de charge et de décharge)."""
    fault_flags: FaultFlags = FaultFlags()
    """Les indicateurs de défaut courants."""

    @property
    def ship_mode(self) -> bool:
        """Indique si le BMON est en mode SHIP (toutes les sorties coupées)."""
        return (self.sys_ctrl1 & SYS_CTRL1_SHIP) == SYS_CTRL1_SHIP

    @property
    def charge_enabled(self) -> bool:
        return bool(self.sys_ctrl2 & SYS_CTRL2_CHG_ON) and not self.ship_mode

    @property
    def discharge_enabled(self) -> bool:
        return bool(self.sys_ctrl2 & SYS_CTRL2_DSG_ON) and not self.ship_mode

    @property
    def cellbal_mask(self) -> int:
        """Le masque d'équilibrage sur les dix groupes (bit 0 = groupe 1)."""
        return (self.cellbal[0] & 0x1F) | ((self.cellbal[1] & 0x1F) << CELLBAL_BITS)

    def enter_ship_mode(self) -> None:
        self.sys_ctrl1 |= SYS_CTRL1_SHIP
        self.sys_ctrl2 = 0
        self.cellbal = [0, 0, 0]

    def exit_ship_mode(self) -> None:
        self.sys_ctrl1 &= ~SYS_CTRL1_SHIP & 0xFF
        self.sys_ctrl2 = SYS_CTRL2_CHG_ON | SYS_CTRL2_DSG_ON

    def read_register(self, register: Register) -> int:
        if register in VC_REGISTERS:
            return int(round(self.pack.voltage(VC_REGISTERS.index(register) + 1)))

        match register:
            case Register.SYS_STAT:
                return self.fault_flags.to_sys_stat()
            case Register.CELLBAL1 | Register.CELLBAL2 | Register.CELLBAL3:
                return self.cellbal[CELLBAL_REGISTERS.index(register)]
            case Register.SYS_CTRL1:
                return self.sys_ctrl1
            case Register.SYS_CTRL2:
                return self.sys_ctrl2
            case Register.OV_TRIP:
                return self.ov_trip
            case Register.UV_TRIP:
                return self.uv_trip
            case Register.CC:
                return int(round(min(self.pack.last_load_ma, REGISTER_MASK)))

        raise UnknownRegisterError(reg_addr=int(register))


def to_register(reg_addr: int) -> Register:
    """
    Convertit une adresse en registre.

    :param reg_addr: L'adresse.
    :type reg_addr: int
    :return: Le registre.
    :rtype: Register
    :raises UnknownRegisterError: Si l'adresse ne correspond à aucun registre.
    """
    try:
        return Register(reg_addr)
    except ValueError:
        raise UnknownRegisterError(reg_addr=reg_addr) from None


def i2c_access(regs: BmonRegisters, msg: I2cMessage) -> Optional[int]:
    """
    Exécute un accès I2C sur le fichier de registres.

    Les lectures retournent le contenu du registre (les registres VC reflètent la tension du groupe au
    moment de la lecture). Les écritures de UV_TRIP et OV_TRIP sont bornées aux plages du composant;
    l'écriture du mode SHIP coupe toutes les sorties. Une écriture dans un registre en lecture seule
    est ignorée avec un avertissement.

    :param regs: Le fichier de registres.
    :type regs: BmonRegisters
    :param msg: Le message I2C.
    :type msg: I2cMessage
    :return: La valeur lue, la valeur stockée pour une écriture, ou None si l'écriture est ignorée.
    :rtype: Optional[int]
    :raises I2cTimeoutError: Si le BMON est en mode SHIP.
    :raises UnknownRegisterError: Si le registre n'existe pas.
    """
    register = to_register(msg.reg_addr)

    if regs.ship_mode:
        raise I2cTimeoutError(reg_addr=msg.reg_addr)

    if msg.rw == I2cOperation.READ:
        return regs.read_register(register)

    if register in READ_ONLY_REGISTERS:
        LOGGER.warning(f"Écriture ignorée dans le registre en lecture seule {register.name}.")
        return None

    match register:
        case Register.UV_TRIP:
            regs.uv_trip = min(max(msg.value, UV_TRIP_RANGE_MV[0]), UV_TRIP_RANGE_MV[1])
            return regs.uv_trip
        case Register.OV_TRIP:
            regs.ov_trip = min(max(msg.value, OV_TRIP_RANGE_MV[0]), OV_TRIP_RANGE_MV[1])
            return regs.ov_trip
        case Register.SYS_STAT:
            # Écriture d'un 1 pour effacer.
            remaining = regs.fault_flags.to_sys_stat() & ~msg.value
            regs.fault_flags = FaultFlags.from_sys_stat(remaining)
            return remaining
        case Register.CELLBAL1 | Register.CELLBAL2 | Register.CELLBAL3:
            regs.cellbal[CELLBAL_REGISTERS.index(register)] = msg.value & 0x1F
            return msg.value & 0x1F
        case Register.SYS_CTRL1:
            if (msg.value & SYS_CTRL1_SHIP) == SYS_CTRL1_SHIP:
                regs.enter_ship_mode()
            else:
                regs.sys_ctrl1 = msg.value & 0xFF
            return regs.sys_ctrl1
        case Register.SYS_CTRL2:
            regs.sys_ctrl2 = msg.value & (SYS_CTRL2_CHG_ON | SYS_CTRL2_DSG_ON)
            return regs.sys_ctrl2

    raise UnknownRegisterError(reg_addr=msg.reg_addr)


def hardware_protect_check(regs: BmonRegisters) -> FaultFlags:
    """
    Recalcule les indicateurs de défaut matériel : underTrip si un groupe est sous UV_TRIP, overTrip si
    un groupe dépasse OV_TRIP.

    :param regs: Le fichier de registres.
    :type regs: BmonRegisters
    :return: Les indicateurs de défaut.
    :rtype: FaultFlags
    """
    if regs.ship_mode:
        return regs.fault_flags

    voltages = regs.pack.voltages
    regs.fault_flags = FaultFlags(
        under_trip=bool((voltages < regs.uv_trip).any()),
        over_trip=bool((voltages > regs.ov_trip).any()),
    )

    return regs.fault_flags


@dataclass
class BatteryMonitor:
    """
    Nœud BMON : fichier de registres et journalisation des accès dans le journal d'événements.
    """

    regs: BmonRegisters
    """Le fichier de registres."""
    event_log: EventLog
    """Le journal d'événements de la simulation."""

    @property
    def pack(self) -> BatteryPack:
        return self.regs.pack

    @property
    def ship_mode(self) -> bool:
        return self.regs.ship_mode

    def access(self, msg: I2cMessage) -> Optional[int]:
        """
        Accès I2C journalisé. Une écriture qui modifie un registre produit un événement i2c-write; un
        accès en mode SHIP produit un événement i2c-timeout avant de relancer l'exception.

        :param msg: Le message I2C.
        :type msg: I2cMessage
        :return: La valeur lue ou stockée.
        :rtype: Optional[int]
        :raises I2cTimeoutError: Si le BMON est en mode SHIP.
        """
        was_ship = self.regs.ship_mode
        before = None

        if msg.rw == I2cOperation.WRITE and not was_ship and msg.reg_addr not in READ_ONLY_REGISTERS:
            before = self.regs.read_register(to_register(msg.reg_addr))

        try:
            stored = i2c_access(self.regs, msg)
        except I2cTimeoutError:
            self.event_log.append(NODE_NAME, EventKind.I2C_TIMEOUT, reg=f"0x{msg.reg_addr:02X}")
            raise

        if msg.rw == I2cOperation.WRITE and stored is not None and stored != before:
            self.event_log.append(
                NODE_NAME,
                EventKind.I2C_WRITE,
                reg=to_register(msg.reg_addr).name,
                value=msg.value,
                stored=stored,
            )

        if self.regs.ship_mode and not was_ship:
            LOGGER.info("Le BMON entre en mode SHIP : toutes les sorties sont coupées.")
            self.event_log.append(NODE_NAME, EventKind.SHIP_MODE, active=True)

        return stored

    def read_cell_voltages(self) -> list[int]:
        """
        Lecture en bloc des registres VC1 à VC10.

        :return: Les tensions des groupes en millivolts.
        :rtype: list[int]
        :raises I2cTimeoutError: Si le BMON est en mode SHIP.
        """
        if self.regs.ship_mode:
            self.event_log.append(NODE_NAME, EventKind.I2C_TIMEOUT, reg=Register.VC1.name)
            raise I2cTimeoutError(reg_addr=int(Register.VC1))

        return [int(round(voltage)) for voltage in self.regs.pack.voltages.tolist()]

    def protect_check(self) -> FaultFlags:
        return hardware_protect_check(self.regs)

    def boot_signal(self) -> bool:
        """
        Signal de démarrage externe (chargeur ou nouveau scénario) : sort du mode SHIP.

        :return: Vrai si le BMON était en mode SHIP.
        :rtype: bool
        """
        if not self.regs.ship_mode:
            return False

        self.regs.exit_ship_mode()
        self.event_log.append(NODE_NAME, EventKind.SHIP_MODE, active=False)
        LOGGER.info("Signal de démarrage : le BMON quitte le mode SHIP.")

        return True
