import math
import numpy as np
import pytest
from core.errors import ContractViolation
from sampler.diagnostics import diagnostics, effective_sample_size, geweke_z
from sampler.schema import ChainDraws
from utils.rng import generator_for

def test_iid_draws_have_full_ess():
    x = generator_for(1, "diag").standard_normal(1000)
    assert 800 <= effective_sample_size(x) <= 1200

def test_constant_chain_is_flagged_not_fatal():
    assert math.isnan(effective_sample_size(np.full(50, 3.0)))
    assert math.isnan(geweke_z(np.full(50, 3.0)))

def test_alternating_chain():
    x = np.tile([1.0, -1.0], 500)
    assert effective_sample_size(x) >= x.size

def test_autocorrelated_chain_has_reduced_ess():
    rng = generator_for(2, "diag")
    x = np.empty(2000)
    x[0] = 0.0
    for t in range(1, x.size):
        x[t] = 0.9 * x[t - 1] + rng.standard_normal()
    # AR(1) with rho = 0.9: ESS ~ n (1 - rho) / (1 + rho) ~ 105
    assert 50 <= effective_sample_size(x) <= 250

def test_geweke_on_stationary_draws():
    x = generator_for(3, "diag").standard_normal(2000)
    assert abs(geweke_z(x)) < 4.0

def test_geweke_detects_drift():
    x = np.repeat([0.0, 5.0], 250) + generator_for(4, "diag").standard_normal(500) * 0.1
    assert abs(geweke_z(x)) > 4.0

def test_too_few_draws():
    with pytest.raises(ContractViolation):
        effective_sample_size(np.arange(5.0))
    with pytest.raises(ContractViolation):
        geweke_z(np.arange(9.0))

def test_chain_summary_per_block():
    rng = generator_for(5, "diag")
    d, n, p, k = 40, 3, 4, 2
    chain = ChainDraws(
        theta=rng.standard_normal((d, n)),
        beta=rng.standard_normal((d, p)),
        gamma=np.full(d, 2.0),
        z=rng.standard_normal((d, n, k)),
        w=rng.standard_normal((d, p, k)),
        sigma_theta_sq=np.exp(rng.standard_normal(d)),
    )
    out = diagnostics(chain)
    assert set(out) == {"theta", "beta", "gamma", "sigma_theta_sq", "z", "w"}
    assert out["z"].n_series == n * k
    assert out["gamma"].n_degenerate == 1
    assert out["gamma"].ess_min is None
    assert out["theta"].trace_min <= out["theta"].trace_max
    assert out["w"].ess_min > 0
