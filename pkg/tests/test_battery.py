"""
Tests du modèle de batterie, du moniteur BMON et de la calibration.
"""

import numpy as np
import pytest

from battery import (
    BatteryMonitor,
    BatteryPack,
    BmonRegisters,
    I2cMessage,
    I2cTimeoutError,
    PackSpec,
    Register,
    UnknownRegisterError,
    compute_batt_level,
    hardware_protect_check,
    i2c_access,
    open_circuit_voltage,
    soc_fraction_for_level,
)
from battery.battery_pack import MS_PER_HOUR
from battery.calibration import fit_load_ma, simulate_ubr_discharge, time_to_empty_hours
from config import Profile, SimulationConfig
from simkern import EventKind, EventLog


@pytest.fixture
def pack_factory(simulation_config: SimulationConfig):
    def _make(profile: Profile = Profile.M365, initial_soc: float = 100.0, uniform: bool = True) -> BatteryPack:
        spec = PackSpec.from_profile(simulation_config.profile(profile))
        return BatteryPack.from_profile(spec, simulation_config.battery, initial_soc=initial_soc, uniform=uniform)

    return _make


# Pack


def test_full_pack_reads_4200_mv_and_full_level(pack_factory):
    pack = pack_factory()

    assert np.allclose(pack.voltages, 4200.0)
    assert pack.compute_batt_level() == pytest.approx(100.0)
    assert pack.check_cell_health() == []
    assert pack.autonomy_loss_pct() == pytest.approx(0.0)


def test_half_level_maps_to_3900_mv(pack_factory):
    pack = pack_factory(initial_soc=50.0)

    assert soc_fraction_for_level(50.0) == pytest.approx(0.6)
    assert np.allclose(pack.voltages, 3900.0)
    assert pack.compute_batt_level() == pytest.approx(50.0)


def test_voltages_follow_every_state_change(pack_factory):
    pack = pack_factory()
    first = pack.voltages

    assert pack.voltages is first
    assert not first.flags.writeable

    pack.charge_mah[2] = -pack.params.deep_reserve * pack.nominal_mah / 2
    assert pack.voltages[2] == pytest.approx(1800.0)

    pack.dead[4] = True
    assert pack.voltages[4] == 0.0

    pack.step_discharge(2600.0, 60_000)
    assert pack.voltages[0] < 4200.0


def test_deep_reserve_voltage_falls_linearly_to_zero():
    nominal = 2600.0
    charge = np.array([-130.0, -260.0, -300.0])
    voltages = open_circuit_voltage(charge, np.full(3, nominal), nominal, deep_reserve=0.10)

    assert voltages.tolist() == pytest.approx([1800.0, 0.0, 0.0])


def test_batt_level_is_clamped_interpolation_of_mean_voltage():
    assert compute_batt_level([3900] * 10) == pytest.approx(50.0)
    assert compute_batt_level([3000] * 10) == 0.0
    assert compute_batt_level([4500] * 10) == 100.0
    assert compute_batt_level([]) == 0.0


def test_step_discharge_rejects_non_positive_duration(pack_factory):
    with pytest.raises(ValueError):
        pack_factory().step_discharge(1000.0, 0)


def test_group_at_zero_volt_dies_with_residual_capacity(pack_factory):
    pack = pack_factory(initial_soc=0.0)

    pack.step_discharge(3000.0, 1_000_000)
    newly_dead = pack.apply_undervolt_degradation(100)

    assert newly_dead == list(range(1, 11))
    assert pack.check_cell_health() == list(range(1, 11))
    assert np.allclose(pack.voltages, 0.0)
    assert np.allclose(pack.effective_mah, 0.75 * pack.nominal_mah)
    assert np.allclose(pack.degradation, 4.0)
    assert pack.autonomy_loss_pct() == pytest.approx(100.0 * (1 - 0.75 / 4.0))
    assert pack.min_live_voltage() == 0.0


def test_dead_group_is_not_discharged_again(pack_factory):
    pack = pack_factory(initial_soc=0.0)
    pack.step_discharge(3000.0, 1_000_000)
    pack.apply_undervolt_degradation(100)
    before = pack.charge_mah.copy()

    pack.step_discharge(3000.0, 10_000)

    assert np.array_equal(pack.charge_mah, before)


def test_weak_group_discharges_faster(pack_factory):
    pack = pack_factory(uniform=False)
    weak = pack.params.weak_group

    pack.step_discharge(2600.0, 3_600_000)

    assert pack.charge_mah[weak] < np.delete(pack.charge_mah, weak).min()


def test_balancing_moves_charge_from_selected_high_group_to_lowest(pack_factory):
    pack = pack_factory()
    pack.charge_mah[1] = -100.0
    before = pack.charge_mah.copy()

    moved = pack.balance_step(0b1)

    assert moved == pytest.approx(0.05)
    assert pack.charge_mah[0] == pytest.approx(before[0] - 0.05)
    assert pack.charge_mah[1] == pytest.approx(before[1] + 0.05 * 0.98)


def test_balancing_is_idle_without_mask_or_below_critical_delta(pack_factory):
    unbalanced = pack_factory()
    unbalanced.charge_mah[1] = -100.0

    assert unbalanced.balance_step(0) == 0.0
    assert pack_factory().balance_step(0x3FF) == 0.0


def test_charging_stops_at_target_and_skips_dead_groups(pack_factory):
    pack = pack_factory(initial_soc=50.0)
    pack.dead[3] = True

    added = pack.charge_step(2000.0, 3_600_000, target_cell_mv=4200.0)

    per_cell = 2000.0 / 3
    assert added == pytest.approx(per_cell * 9)
    assert pack.charge_mah[3] == pytest.approx(soc_fraction_for_level(50.0) * pack.nominal_mah)

    full = pack_factory()
    assert full.charge_step(2000.0, 1000, target_cell_mv=4200.0) == 0.0


def test_overvoltage_charger_drives_cells_above_4200(pack_factory):
    pack = pack_factory()

    for _ in range(60):
        pack.charge_step(2000.0, 60_000, target_cell_mv=4900.0)

    assert pack.voltages.min() > 4600.0
    assert pack.voltages.max() <= 5000.0


def test_discharge_conserves_charge_property(pack_factory, rng: np.random.Generator):
    for _ in range(1000):
        pack = pack_factory(initial_soc=float(rng.uniform(20.0, 100.0)), uniform=bool(rng.integers(0, 2)))
        load = float(rng.uniform(0.0, 5000.0))
        dt = int(rng.integers(1, 10_000))
        before = pack.total_charge_mah
        expected = float((load / 3 * dt / MS_PER_HOUR * pack.degradation * pack.drain_weights).sum())

        pack.step_discharge(load, dt)

        assert before - pack.total_charge_mah == pytest.approx(expected, rel=1e-9, abs=1e-9)
        assert pack.total_charge_mah <= before


def test_degradation_is_monotonic_property(pack_factory, rng: np.random.Generator):
    pack = pack_factory(initial_soc=5.0, uniform=False)
    effective = pack.effective_mah.copy()
    degradation = pack.degradation.copy()
    dead = pack.dead.copy()

    for _ in range(1000):
        pack.step_discharge(float(rng.uniform(0.0, 3000.0)), int(rng.integers(1_000, 60_000)))
        pack.apply_undervolt_degradation(int(rng.integers(1_000, 60_000)))

        assert np.all(pack.effective_mah <= effective + 1e-12)
        assert np.all(pack.degradation >= degradation - 1e-12)
        assert np.all(pack.dead >= dead)
        assert np.all(pack.effective_mah >= 0.75 * pack.nominal_mah - 1e-9)
        assert np.all(pack.degradation <= 4.0 + 1e-12)

        effective, degradation, dead = pack.effective_mah.copy(), pack.degradation.copy(), pack.dead.copy()


def test_capacity_decays_below_dangerous_threshold_only(pack_factory):
    healthy = pack_factory(initial_soc=50.0)
    healthy.apply_undervolt_degradation(3_600_000)
    assert np.allclose(healthy.effective_mah, healthy.nominal_mah)

    drained = pack_factory(initial_soc=0.0)
    drained.charge_mah[:] = -100.0
    voltage = drained.voltages[0]
    assert drained.thresholds.c_uvt < voltage < drained.thresholds.d_uvt

    drained.apply_undervolt_degradation(3_600_000)
    assert np.allclose(drained.effective_mah, drained.nominal_mah * (1 - 0.025))
    assert np.allclose(drained.degradation, 1.0)


# BMON


@pytest.fixture
def regs(pack_factory) -> BmonRegisters:
    return BmonRegisters(pack=pack_factory(initial_soc=50.0))


def test_vc_registers_mirror_cell_voltages(regs: BmonRegisters):
    assert i2c_access(regs, I2cMessage.read(Register.VC1)) == 3900
    assert i2c_access(regs, I2cMessage.read(Register.VC10)) == 3900


def test_trip_writes_are_clamped_to_component_ranges(regs: BmonRegisters):
    assert i2c_access(regs, I2cMessage.write(Register.UV_TRIP, 1000)) == 1580
    assert i2c_access(regs, I2cMessage.write(Register.UV_TRIP, 3000)) == 2750
    assert i2c_access(regs, I2cMessage.write(Register.OV_TRIP, 4900)) == 4700
    assert regs.ov_trip == 4700


def test_read_only_write_is_ignored(regs: BmonRegisters):
    assert i2c_access(regs, I2cMessage.write(Register.VC1, 100)) is None
    assert i2c_access(regs, I2cMessage.read(Register.VC1)) == 3900


def test_unknown_register_raises(regs: BmonRegisters):
    with pytest.raises(UnknownRegisterError):
        i2c_access(regs, I2cMessage.read(0x7F))


def test_register_values_are_16_bits():
    with pytest.raises(ValueError):
        I2cMessage.write(Register.OV_TRIP, 0x10000)


def test_cellbal_mask_combines_two_registers(regs: BmonRegisters):
    i2c_access(regs, I2cMessage.write(Register.CELLBAL1, 0x1F))
    i2c_access(regs, I2cMessage.write(Register.CELLBAL2, 0x01))

    assert regs.cellbal_mask == 0x3F


def test_ship_mode_cuts_outputs_and_times_out_i2c(regs: BmonRegisters, event_log: EventLog):
    bmon = BatteryMonitor(regs=regs, event_log=event_log)

    bmon.access(I2cMessage.write(Register.SYS_CTRL1, 0x03))

    assert regs.ship_mode
    assert not regs.charge_enabled
    assert not regs.discharge_enabled
    assert event_log.first(EventKind.SHIP_MODE, active=True) is not None

    with pytest.raises(I2cTimeoutError):
        bmon.access(I2cMessage.read(Register.VC1))

    assert event_log.count(EventKind.I2C_TIMEOUT) == 1

    assert bmon.boot_signal()
    assert not regs.ship_mode
    assert regs.discharge_enabled
    assert not bmon.boot_signal()


def test_logged_write_records_clamped_value(regs: BmonRegisters, event_log: EventLog):
    BatteryMonitor(regs=regs, event_log=event_log).access(I2cMessage.write(Register.UV_TRIP, 1580))

    record = event_log.first(EventKind.I2C_WRITE)
    assert record.detail["reg"] == "UV_TRIP"
    assert record.detail["stored"] == 1580


def test_hardware_protection_flags(pack_factory):
    low = BmonRegisters(pack=pack_factory(initial_soc=0.0))
    low.pack.charge_mah[2] = -100.0
    assert hardware_protect_check(low).under_trip

    high = BmonRegisters(pack=pack_factory())
    high.pack.charge_mah[0] = 1.2 * high.pack.nominal_mah
    flags = hardware_protect_check(high)
    assert flags.over_trip
    assert not flags.under_trip

    assert i2c_access(high, I2cMessage.write(Register.SYS_STAT, 0x04)) == 0
    assert not high.fault_flags.any


# Calibration


@pytest.mark.parametrize("profile, load, hours", [(Profile.M365, 2600.0, 3.0), (Profile.ES3, 1275.0, 6.0)])
def test_nominal_load_empties_pack_in_target_time(simulation_config: SimulationConfig, profile, load, hours):
    assert time_to_empty_hours(simulation_config.profile(profile), simulation_config.battery, load) == pytest.approx(
        hours, abs=0.01
    )


def test_fit_load_recovers_nominal_load(simulation_config: SimulationConfig):
    load = fit_load_ma(simulation_config.profile(Profile.M365), simulation_config.battery, 3.0)

    assert load == pytest.approx(2600.0, rel=0.005)


def test_es3_drv_check_stops_fast_discharge(simulation_config: SimulationConfig):
    es3 = simulate_ubr_discharge(simulation_config.profile(Profile.ES3), simulation_config.battery, hours=10.0)
    m365 = simulate_ubr_discharge(simulation_config.profile(Profile.M365), simulation_config.battery, hours=3.5)

    assert es3.e24_hour is not None
    assert m365.e24_hour is None
    assert m365.autonomy_loss_pct > es3.autonomy_loss_pct
