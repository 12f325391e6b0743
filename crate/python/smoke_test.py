"""Smoke test for the dvslab extension module.

Build it first:

    cargo build -p dvs-lab-py --release --features extension-module
    cp target/release/libdvslab.so python/dvslab.so
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import dvslab


def main():
    print("dvslab", dvslab.__version__)

    scheme = dvslab.Scheme("dhmac", kappa=16, seed=1)
    pk_s, sk_s = scheme.keygen()
    pk_v, sk_v = scheme.keygen()
    sig = scheme.sign(sk_s, pk_s, pk_v, b"smoke")
    assert sig == scheme.simulate(sk_v, pk_v, pk_s, b"smoke")
    assert scheme.verify(sk_v, pk_v, pk_s, b"smoke", sig)
    print(scheme, "group", scheme.group, "signature", sig.hex())

    leaky = dvslab.estimate("psi", "leaky", "trailer", n=3, trials=2000, seed=7)
    dhmac = dvslab.estimate("psi", "dhmac", "trailer", n=3, trials=2000, seed=7)
    print("leaky ", leaky)
    print("dhmac ", dhmac)
    assert leaky.advantage > 0.49
    assert abs(dhmac.advantage) < 0.05
    assert dvslab.check_relation(dhmac, leaky, direction="leq")

    wrapped = dvslab.estimate("psi", "leaky", "trailer", n=3, reduction="nf2adv", trials=5000, seed=7)
    print("nf2adv", wrapped)

    spec = {
        "seed": 3,
        "trials": 1000,
        "experiments": [
            {"name": "psi", "game": "psi", "scheme": "leaky", "adversary": "trailer", "n": 4},
            {"name": "nrpsi", "game": "nrpsi", "scheme": "leaky", "adversary": "trailer", "n": 4},
        ],
        "relations": [{"lhs": "psi", "rhs": "nrpsi", "factor": "2/4", "direction": "leq"}],
    }
    doc = json.loads(dvslab.run_spec(json.dumps(spec)))
    assert all(r["holds"] for r in doc["relations"])
    print("spec relations hold:", len(doc["relations"]))
    print("ok")


if __name__ == "__main__":
    main()
