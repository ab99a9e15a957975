"""
Module du bus UART partagé.

Ce module contient le médium de diffusion qui relie le BCTRL, le BTS, le DRV et le chargeur : chaque
nœud alimenté observe toutes les trames, seul le destinataire les traite. Le bus applique la capacité
par fenêtre (inondation comprise), la limitation de débit par émetteur (C4), la protection des trames
par le canal sécurisé (C3) et les rôles autorisés par commande.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from loguru import logger

from config import BusConfig
from simkern import EventKind, EventLog, PeriodicHandle, SimKernel

from .bus_ids import Command, PacketType, is_allowed, node_name
from .exception_bus import FrameError, SecureChannelError
from .frame import UartFrame, decode_frame, encode_frame, format_frame_line
from .rate_limiter import SenderRateLimiter
from .secure_channel import SecureChannelManager

LOGGER = logger.bind(name="BES-Simulation.Bus.UartBus")

NODE_NAME: str = "BUS"

FrameHandler = Callable[[UartFrame], None]
PowerCheck = Callable[[], bool]


@dataclass
class BusPort:
    """
    Raccordement d'un nœud au bus.
    """

    code: int
    """Le code du nœud."""
    handler: FrameHandler
    """Le traitement des trames adressées au nœud."""
    powered: PowerCheck
    """Indique si le nœud est alimenté."""
    observed: deque[tuple[int, UartFrame]]
    """Les dernières trames vues sur le bus (instant, trame)."""
    listeners: list[FrameHandler] = field(default_factory=list)
    """Les observateurs de toutes les trames vues par le nœud."""


@dataclass
class BusCounters:
    """
    Compteurs du bus exportés dans les métriques.
    """

    frames_sent: int = 0
    frames_dropped: int = 0
    legit_frames_dropped: int = 0
    frames_rejected: int = 0
    flood_frames: int = 0
    flood_dropped: int = 0


@dataclass
class UartBus:
    """
    Bus UART à diffusion.
    """

    kernel: SimKernel
    """Le noyau de simulation."""
    event_log: EventLog
    """Le journal d'événements."""
    config: BusConfig
    """Les paramètres du bus."""
    channel: Optional[SecureChannelManager] = None
    """Le canal sécurisé (C3), absent si la contre-mesure est inactive."""
    rate_limiter: Optional[SenderRateLimiter] = None
    """La limitation de débit (C4), absente si la contre-mesure est inactive."""
    ports: dict[int, BusPort] = field(default_factory=dict)
    counters: BusCounters = field(default_factory=BusCounters)
    transmitted: list[tuple[int, UartFrame, int]] = field(default_factory=list)
    """Les trames placées sur le bus (instant, trame, répétitions)."""
    _window: int = -1
    _window_used: int = 0
    _flood_source: Optional[int] = None
    _flood_per_window: int = 0
    _flood_handle: Optional[PeriodicHandle] = None

    def attach(self, code: int, handler: FrameHandler, powered: PowerCheck) -> BusPort:
        """
        Raccorde un nœud au bus.

        :param code: Le code du nœud.
        :type code: int
        :param handler: Le traitement des trames adressées au nœud.
        :type handler: FrameHandler
        :param powered: Indique si le nœud est alimenté.
        :type powered: PowerCheck
        :return: Le raccordement.
        :rtype: BusPort
        """
        port = BusPort(
            code=code, handler=handler, powered=powered, observed=deque(maxlen=self.config.observation_buffer)
        )
        self.ports[code] = port

        return port

    def observed(self, code: int) -> list[tuple[int, UartFrame]]:
        """
        Retourne les trames observées par un nœud.

        :param code: Le code du nœud.
        :type code: int
        :return: Les paires (instant, trame).
        :rtype: list[tuple[int, UartFrame]]
        """
        port = self.ports.get(code)

        return list(port.observed) if port is not None else []

    def listen(self, code: int, listener: FrameHandler) -> None:
        """
        Ajoute un observateur des trames vues par un nœud, qu'elles lui soient adressées ou non.

        :param code: Le code du nœud.
        :type code: int
        :param listener: L'observateur.
        :type listener: FrameHandler
        """
        self.ports[code].listeners.append(listener)

    def unlisten(self, code: int, listener: FrameHandler) -> None:
        port = self.ports.get(code)

        if port is not None and listener in port.listeners:
            port.listeners.remove(listener)

    @property
    def frame_dump(self) -> list[str]:
        """Les lignes du vidage des trames délivrées, formatées à la demande."""
        lines: list[str] = []

        for at, frame, count in self.transmitted:
            lines.extend([format_frame_line(at, frame)] * count)

        return lines

    @property
    def secure(self) -> bool:
        return self.channel is not None

    @property
    def flooding(self) -> bool:
        return self._flood_source is not None

    def _roll_window(self) -> None:
        window = self.kernel.now // self.config.window_ms

        if window == self._window:
            return

        self._window = window
        self._window_used = 0

        if self._flood_source is not None:
            self._inject_flood(window * self.config.window_ms)

    def _inject_flood(self, at: int) -> None:
        offered = self._flood_per_window
        admitted = offered

        if self.rate_limiter is not None:
            admitted = 0

            while admitted < offered and self.rate_limiter.admit(self._flood_source, at):
                admitted += 1

        delivered = min(admitted, self.config.window_capacity)
        self._window_used = delivered
        self.counters.flood_frames += offered
        self.counters.flood_dropped += offered - delivered
        self.counters.frames_sent += delivered
        source = node_name(self._flood_source)

        # Un enregistrement par fenêtre et par issue, le champ count porte le nombre de trames.
        if delivered:
            self.event_log.append(
                NODE_NAME,
                EventKind.FRAME_SENT,
                sender=source,
                receiver=source,
                origin=source,
                cmd=f"0x{Command.FLOOD:02X}",
                wrapped=False,
                count=delivered,
                flood=True,
            )
            dummy = UartFrame(
                sender=self._flood_source,
                receiver=self._flood_source,
                ptype=PacketType.NOTIFY,
                command=Command.FLOOD,
                payload=bytes(8),
            )
            self.transmitted.append((at, dummy, delivered))

        for reason, count in (("rate-limit", offered - admitted), ("bus-saturated", admitted - delivered)):
            if count:
                self.event_log.append(
                    NODE_NAME,
                    EventKind.FRAME_DROPPED,
                    sender=source,
                    receiver=source,
                    cmd=f"0x{Command.FLOOD:02X}",
                    reason=reason,
                    count=count,
                    flood=True,
                )

    def start_flood(self, source: int, rate_fps: int) -> None:
        """
        Démarre l'inondation du bus par des trames factices.

        :param source: L'émetteur annoncé des trames factices.
        :type source: int
        :param rate_fps: Le débit offert en trames par seconde.
        :type rate_fps: int
        """
        self._flood_source = source
        self._flood_per_window = max(1, rate_fps * self.config.window_ms // 1000)
        self._window = -1
        self._roll_window()
        self._flood_handle = self.kernel.every(
            self.config.window_ms,
            self._roll_window,
            start=(self.kernel.now // self.config.window_ms + 1) * self.config.window_ms,
            label="flood",
        )
        self.event_log.append(
            NODE_NAME, EventKind.ATTACK_PHASE, phase="flood-start", source=node_name(source), rate_fps=rate_fps
        )
        LOGGER.info(f"Inondation du bus à {rate_fps} trames/s depuis {node_name(source)}.")

    def stop_flood(self) -> None:
        if self._flood_source is None:
            return

        SimKernel.cancel(self._flood_handle)
        self._flood_source = None
        self._flood_handle = None
        self.event_log.append(NODE_NAME, EventKind.ATTACK_PHASE, phase="flood-stop")

    def _drop(self, frame: UartFrame, reason: str, legit: bool) -> None:
        self.counters.frames_dropped += 1

        if legit:
            self.counters.legit_frames_dropped += 1

        self.event_log.append(
            NODE_NAME,
            EventKind.FRAME_DROPPED,
            sender=node_name(frame.sender),
            receiver=node_name(frame.receiver),
            cmd=f"0x{frame.command:02X}",
            reason=reason,
            count=1,
            flood=False,
        )

    def send(self, origin: int, frame: UartFrame, legit: bool = True) -> bool:
        """
        Émet une trame. Le champ émetteur est fourni par l'appelant et n'est pas vérifié : un nœud peut
        annoncer un autre émetteur que lui-même. Avec C3, la trame est protégée par la session que le
        nœud d'origine possède avec le destinataire.

        :param origin: Le nœud qui émet physiquement la trame.
        :type origin: int
        :param frame: La trame en clair.
        :type frame: UartFrame
        :param legit: Faux pour les trames injectées par un micrologiciel malveillant.
        :type legit: bool
        :return: Vrai si la trame a été placée sur le bus.
        :rtype: bool
        """
        port = self.ports.get(origin)

        if port is not None and not port.powered():
            return False

        if self.channel is not None and self.channel.session(origin, frame.receiver) is not None:
            frame = self.channel.wrap_from(origin, frame)

        self._roll_window()

        if self.rate_limiter is not None and not self.rate_limiter.admit(frame.sender, self.kernel.now):
            self._drop(frame, reason="rate-limit", legit=legit)
            return False

        if self._window_used >= self.config.window_capacity:
            self._drop(frame, reason="bus-saturated", legit=legit)
            return False

        self._window_used += 1
        self.counters.frames_sent += 1
        wire = encode_frame(frame)
        now = self.kernel.now
        self.transmitted.append((now, frame, 1))
        self.event_log.append(
            NODE_NAME,
            EventKind.FRAME_SENT,
            sender=node_name(frame.sender),
            receiver=node_name(frame.receiver),
            origin=node_name(origin),
            cmd=f"0x{frame.command:02X}",
            wrapped=frame.wrapped,
            count=1,
            flood=False,
        )
        self.kernel.schedule(lambda: self._deliver(wire), at=now, label="uart-deliver")

        return True

    def _reject(self, receiver: int, frame: UartFrame, reason: str) -> None:
        self.counters.frames_rejected += 1
        self.event_log.append(
            node_name(receiver),
            EventKind.FRAME_REJECTED,
            sender=node_name(frame.sender),
            cmd=f"0x{frame.command:02X}",
            reason=reason,
        )
        LOGGER.warning(
            f"{node_name(receiver)} rejette la trame 0x{frame.command:02X} de {node_name(frame.sender)} : {reason}."
        )

    def _authenticate(self, receiver: int, frame: UartFrame) -> Optional[UartFrame]:
        if self.channel is None or not self.channel.has_sessions(receiver):
            return frame

        if frame.wrapped:
            try:
                return self.channel.unwrap_at(receiver, frame)
            except SecureChannelError as error:
                self._reject(receiver, frame, reason=type(error).__name__.removesuffix("Error"))
                return None

        self._reject(receiver, frame, reason="Unauthenticated")

        return None

    def _deliver(self, wire: bytes) -> None:
        try:
            frame = decode_frame(wire)
        except FrameError as error:
            LOGGER.warning(f"Trame illisible sur le bus : {error}")
            return

        now = self.kernel.now

        for port in self.ports.values():
            if not port.powered():
                continue

            port.observed.append((now, frame))

            for listener in tuple(port.listeners):
                listener(frame)

            if port.code != frame.receiver:
                continue

            plain = self._authenticate(port.code, frame)

            if plain is None:
                continue

            if not is_allowed(port.code, plain.sender, plain.command):
                self._reject(port.code, plain, reason="AccessDenied")
                continue

            port.handler(plain)

