"""Smoke test for the rotlab extension module.

Install first:  pip install --no-build-isolation -e crates/python
"""

import json

import rotlab


def main() -> None:
    assert "elem_rot" in rotlab.tags()

    rep = json.loads(rotlab.check("elem_rot", n=3, certificates=True))
    assert rep["expectations_met"], rep
    assert all(e["verdict"] == "Member" for e in rep["entries"])

    sys = json.loads(rotlab.export_system("super_rot", n=3, bars=[1, 3]))
    assert sys["goals"], sys

    assert rotlab.membership(["u1.u2 - u2.u1"], "u1.u1.u2 - u2.u1.u1", 4) == ("Member", 4)
    assert rotlab.membership(["u1.u2 - u2.u1"], "u1.u2", 4) == ("NotMemberUpToBound", 4)

    assert json.loads(rotlab.identities())["expectations_met"]
    assert json.loads(rotlab.dehn_validate())["expectations_met"]
    assert json.loads(rotlab.counterexamples())["expectations_met"]
    assert "face" in rotlab.dehn_figure("1")

    try:
        rotlab.check("no_such_tag")
    except rotlab.RotlabError:
        pass
    else:
        raise AssertionError("unknown tag accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
