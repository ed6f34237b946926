"""The bundled fig1 model and the example policies written against it."""

from __future__ import annotations

from importlib import resources

from .model import Model, load_model

POLICIES = {
    "friends-of-friends": "@?own (<friend> ?req or <friend><friend> ?req)",
    "common-friends": "@?own (<friend> ?req or <friend:3><friend> ?req)",
    "trusted-common-friends": "@?own <friend:3->0.8><friend> ?req",
    "montparnasse": "@?req pub #Montparnasse",
    "paris": "@?req pub[IsLocation] <is-in> #Paris",
    "charity": (
        "@?own pub[IsCharity] down ?y1 . usr (?req and\n"
        "  @?own pub[IsCharity] down ?y2 . (not ?y1 and usr (?req and\n"
        "    @?own pub[IsCharity] down ?y3 . (not ?y1 and not ?y2 and usr ?req))))"
    ),
    "syria": (
        "@?own pub down ?y1 . <donate> down ?y5 . (#Unocha.Syria and\n"
        "  <donate-from> down ?y3 . usr (?req and\n"
        "    @?own pub down ?y2 . (not ?y1 and <donate> (?y5 and\n"
        "      <donate-from> down ?y4 . (not ?y3 and usr ?req)))))"
    ),
    "rival-friend": "@?own (<friend> ?req and pub <rival> usr ?req)",
    "endorsed-rival-friend": (
        "@?own (<friend->0.8> ?req and\n"
        "  pub <rival> down ?y . usr (?req and <colleague:3<-0.7> pub ?y))"
    ),
    "tennis-friend": "@?own <friend> (?req and pub #Tennis)",
    "sports-friend": "@?own <friend> (?req and pub <is-a> #Sports)",
    "sports-friend-two-levels": "@?own <friend> (?req and pub (<is-a> #Sports or <is-a><is-a> #Sports))",
    "sports-fan-friend": "@?own <friend> (?req and pub cat #Sports)",
}


def fixture_bytes() -> bytes:
    return resources.files("relcheck").joinpath("data/fig1.json").read_bytes()


def fig1() -> Model:
    return load_model(fixture_bytes())
