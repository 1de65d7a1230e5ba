import json
from pathlib import Path

import numpy as np

from lapmult import (
    MarkovKernel,
    ReversibleGenerator,
    WeightedSpace,
    decompose,
    heat_operator,
    random_reversible_generator,
)

GOLDEN = Path(__file__).parent / "data" / "spectral_seed42_golden.json"


def test_golden_spectral_decomposition():
    # basis-independent quantities only: eigenvalues and a heat kernel
    golden = json.loads(GOLDEN.read_text())
    space, gen = random_reversible_generator(golden["seed"], golden["n"])
    assert np.abs(space.weights - golden["weights"]).max() < 1e-14
    dec = decompose(gen)
    assert np.abs(dec.eigenvalues - golden["eigenvalues"]).max() < 1e-12
    kernel = heat_operator(gen, 0.7)
    assert np.abs(kernel.entries - golden["heat_t07"]).max() < 1e-12


def test_decomposition_serialization_round_trip():
    space, gen = random_reversible_generator(3, 4)
    dec = decompose(gen)
    blob = json.dumps(dec.to_dict())
    data = json.loads(blob)
    assert np.abs(np.asarray(data["eigenvalues"]) - dec.eigenvalues).max() == 0.0
    assert np.abs(np.asarray(data["eigenfields"]) - dec.eigenfields).max() == 0.0


def test_generator_and_kernel_serialization():
    space, gen = random_reversible_generator(5, 3)
    gen_data = gen.to_dict()
    rebuilt = ReversibleGenerator(WeightedSpace(gen_data["weights"]), gen_data["entries"])
    assert np.array_equal(rebuilt.entries, gen.entries)

    kernel = heat_operator(gen, 0.4)
    kernel_data = kernel.to_dict()
    rebuilt_kernel = MarkovKernel(
        WeightedSpace(kernel_data["weights"]), kernel_data["entries"], kernel_data["step"]
    )
    assert np.array_equal(rebuilt_kernel.entries, kernel.entries)
    assert rebuilt_kernel.step == 0.4
