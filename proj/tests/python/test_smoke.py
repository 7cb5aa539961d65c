import pytest

import ternkey


@pytest.fixture(scope="module")
def fx():
    return ternkey.FuzzyExtractor.default_instance()


def test_sizes(fx):
    assert fx.response_bits == 131
    assert fx.helper_bits == 262
    assert fx.key_bits == 250
    rec = fx.register([0] * 131)
    assert len(rec.helper_bits) == 262
    assert rec.key_hash.hex() == "66687aadf862bd776c8fc18b8e9f8e20089714856ee233b3902a591d0d5f2925"


def test_bch_round_trip():
    code = ternkey.BchCode.build(8, 18)
    assert (code.n, code.k, code.t) == (255, 131, 18)
    msg = [(i * 7) % 3 % 2 for i in range(131)]
    word = code.encode(msg)
    assert code.is_codeword(word)
    for i in range(0, 180, 10):
        word[i] ^= 1
    assert code.decode(word) == (msg, 18)


def test_polar_transform_is_involution():
    u = [(i * i) % 5 % 2 for i in range(512)]
    assert ternkey.polar_transform(ternkey.polar_transform(u)) == u
    assert ternkey.construct_frozen_set(8, 5).frozen == [0, 1, 2, 3, 4]


def test_enroll_and_regenerate(fx):
    cells = ternkey.simulate_cells(seed=5)
    profile = ternkey.classify_cells(cells)
    bits = ternkey.reference_response(profile, 131)
    rec = fx.register(bits)
    rec.mask = profile.mask[:131]
    rec2 = ternkey.EnrollmentRecord.deserialize(rec.serialize())
    assert rec2 == rec

    reading = ternkey.extract_response(cells, rec2.mask, reading_index=4)
    noisy = ternkey.flip_bits(reading, 0.15, seed=9)
    for decoder in ("sc", "scl:8", "bpl:8"):
        r = fx.regenerate(noisy, rec2, decoder=decoder)
        assert r.match
        assert r.key_hash == rec.key_hash

    other = ternkey.reference_response(ternkey.classify_cells(ternkey.simulate_cells(seed=6)), 131)
    r = fx.regenerate(other, rec2)
    assert not r.match
    assert r.distance_rejected


def test_errors(fx):
    rec = fx.register([1] * 131)
    data = bytearray(rec.serialize())
    with pytest.raises(ternkey.DataError):
        ternkey.EnrollmentRecord.deserialize(bytes(data[:-5]))
    data[-10] ^= 0xFF
    with pytest.raises(ternkey.IntegrityError):
        ternkey.EnrollmentRecord.deserialize(bytes(data))
    with pytest.raises(ValueError):
        ternkey.read_measurement_csv("cell_id,reading_index,r_on_ohms\n0,0,-5\n")
    with pytest.raises(ValueError):
        fx.regenerate([0] * 131, rec, decoder="nope")


def test_experiments_are_deterministic():
    kw = dict(p_values=[0.0, 0.2], trials=30, decoders=["sc", "scl:1"], seed=3)
    a = ternkey.failure_mc_csv(**kw)
    assert a == ternkey.failure_mc_csv(**kw)
    lines = a.strip().splitlines()
    assert lines[0] == "# ternkey-csv v1 failure"
    assert len(lines) == 2 + 4
    svg = ternkey.render_svg(ternkey.ber_sweep_csv(p_values=[0.0, 0.1], trials=20))
    assert svg.startswith("<svg") and svg.count('class="series"') == 2
    assert ternkey.wilson_upper_95(0, 100000) <= 3.7e-5
