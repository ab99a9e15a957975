"""
Ce module contient les constantes pour les identifiants des modèles de données.
"""

# Constantes pour les noms des colonnes du schéma VoltageTraceSchema (voltages.csv).
T_MS: str = "t_ms"
"""Valeur de la constante t_ms."""
VC_PREFIX: str = "vc"
"""Préfixe des colonnes de tension des groupes (vc1 à vc10)."""
VC_COLUMNS: tuple[str, ...] = tuple(f"{VC_PREFIX}{index}" for index in range(1, 11))
"""Les colonnes de tension des groupes."""
BATTLEVEL: str = "battlevel"
"""Valeur de la constante battlevel."""
SLEEPING: str = "sleeping"
"""Valeur de la constante sleeping."""
CHARGING: str = "charging"
"""Valeur de la constante charging."""

# Constantes pour les noms des colonnes du schéma MetricsSchema (metrics.csv) et MatrixSchema.
ATTACK: str = "attack"
"""Valeur de la constante attack."""
PROFILE: str = "profile"
"""Valeur de la constante profile."""
COUNTERMEASURES: str = "countermeasures"
"""Valeur de la constante countermeasures."""
SEED: str = "seed"
"""Valeur de la constante seed."""
DURATION_MS: str = "duration_ms"
"""Valeur de la constante duration_ms."""
TICK_INTERVAL_MS: str = "tick_interval_ms"
"""Valeur de la constante tick_interval_ms."""
INITIAL_SOC: str = "initial_soc"
"""Valeur de la constante initial_soc."""
OUTCOME: str = "outcome"
"""Valeur de la constante outcome."""
SUCCESS: str = "success"
"""Valeur de la constante success."""
FAILURE_REASON: str = "failure_reason"
"""Valeur de la constante failure_reason."""
AUTONOMY_LOSS_PCT: str = "autonomy_loss_pct"
"""Valeur de la constante autonomy_loss_pct."""
DEAD_CELLS: str = "dead_cells"
"""Valeur de la constante dead_cells."""
TIME_TO_REVEAL_MS: str = "time_to_reveal_ms"
"""Valeur de la constante time_to_reveal_ms."""
CRACK_TIME_MS: str = "crack_time_ms"
"""Valeur de la constante crack_time_ms."""
DRAIN_MAH: str = "drain_mah"
"""Valeur de la constante drain_mah."""
SLEEP_INTERVALS: str = "sleep_intervals"
"""Valeur de la constante sleep_intervals."""
FRAMES_SENT: str = "frames_sent"
"""Valeur de la constante frames_sent."""
FRAMES_DROPPED: str = "frames_dropped"
"""Valeur de la constante frames_dropped."""
LEGIT_FRAMES_DROPPED: str = "legit_frames_dropped"
"""Valeur de la constante legit_frames_dropped."""
FRAMES_REJECTED: str = "frames_rejected"
"""Valeur de la constante frames_rejected."""
REBOOTS: str = "reboots"
"""Valeur de la constante reboots."""
EVENTS: str = "events"
"""Valeur de la constante events."""
END_T_MS: str = "end_t_ms"
"""Valeur de la constante end_t_ms."""
