"""Regenerate the synthetic golden fixture (knowledge base + 50-session log).

Run from the repository root: ``python3 tests/data/make_golden_fixture.py``.
The golden output tables under tests/data/golden/ must then be refreshed
with ``modlog analyze`` (see tests/test_golden.py) and re-inspected by hand.
"""

import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

HERE = Path(__file__).parent
DBR = "http://dbpedia.org/resource/"
DBO = "http://dbpedia.org/ontology/"
DBP = "http://dbpedia.org/property/"
WN = "http://www.w3.org/2006/03/wn/wn20/instances/"
AAT = "http://vocab.getty.edu/aat/"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
LABEL = "http://www.w3.org/2000/01/rdf-schema#label"

ENGLAND = ["David_Beckham", "Joe_Cole", "Wayne_Rooney", "Steven_Gerrard", "Frank_Lampard", "Michael_Owen"]
NETHERLANDS = ["Arjen_Robben", "Robin_van_Persie", "Wesley_Sneijder"]
CLUBS = {
    "David_Beckham": ["Real_Madrid", "LA_Galaxy", "AC_Milan"],
    "Joe_Cole": ["Chelsea_FC"],
    "Frank_Lampard": ["Chelsea_FC"],
    "Steven_Gerrard": ["Liverpool_FC"],
    "Michael_Owen": ["Liverpool_FC", "Real_Madrid"],
    "Wayne_Rooney": ["Manchester_United"],
    "Arjen_Robben": ["Chelsea_FC", "Real_Madrid"],
    "Robin_van_Persie": ["Arsenal_FC"],
    "Wesley_Sneijder": ["Real_Madrid"],
}
SPOUSES = [
    ("David_Beckham", "Victoria_Beckham"),
    ("Andre_Agassi", "Steffi_Graf"),
    ("Wayne_Rooney", "Coleen_Rooney"),
    ("Wesley_Sneijder", "Yolanthe_Cabau"),
]
PARTNERS = [("Willem-Alexander", "Maxima_Zorreguieta")]
TENNIS = ["Andre_Agassi", "Boris_Becker", "Steffi_Graf", "Roger_Federer", "Rafael_Nadal"]
MOVEMENTS = {
    "Impressionism": ["Claude_Monet", "Pierre-Auguste_Renoir", "Edgar_Degas"],
    "Post-Impressionism": ["Vincent_van_Gogh", "Paul_Gauguin"],
    "Dutch_Golden_Age": ["Rembrandt", "Johannes_Vermeer"],
}
WORKS = {
    "Water_Lilies": "Claude_Monet",
    "Sunflowers": "Vincent_van_Gogh",
    "The_Starry_Night": "Vincent_van_Gogh",
    "The_Night_Watch": "Rembrandt",
    "Girl_with_a_Pearl_Earring": "Johannes_Vermeer",
}
CITIES = {"Amsterdam": "Netherlands", "Rotterdam": "Netherlands", "Utrecht": "Netherlands",
          "Ghent": "Belgium", "Brussels": "Belgium"}
EXTRA_LABELS = {"Ghent": ["Gent", "Gand"], "Vincent_van_Gogh": ["Van Gogh"], "Claude_Monet": ["Monet"],
                "Rembrandt": ["Rembrandt van Rijn"], "Water_Lilies": ["Water Lilies paintings"]}


def label_of(local):
    return local.replace("_", " ")


def build_kb():
    triples = []
    labels = {}

    def ent(local, ns=DBR):
        iri = ns + local
        labels.setdefault(iri, label_of(local))
        return iri

    for p in ENGLAND:
        triples.append((ent(p), DBP + "nationalteam", ent("England_national_football_team")))
    for p in NETHERLANDS:
        triples.append((ent(p), DBP + "nationalteam", ent("Netherlands_national_football_team")))
    for p, clubs in CLUBS.items():
        for c in clubs:
            triples.append((ent(p), DBP + "clubs", ent(c)))
    for a, b in SPOUSES:
        triples.append((ent(a), DBO + "spouse", ent(b)))
    for a, b in PARTNERS:
        triples.append((ent(a), DBO + "partner", ent(b)))
    for p in TENNIS:
        triples.append((ent(p), DBP + "wordnet_type", ent("synset-tennis_player-noun-1", WN)))
    for m, artists in MOVEMENTS.items():
        for a in artists:
            triples.append((ent(a), DBO + "movement", ent(m)))
    for w, a in WORKS.items():
        triples.append((ent(w), DBO + "author", ent(a)))
    for c, country in CITIES.items():
        triples.append((ent(c), DBO + "country", ent(country)))
        triples.append((ent(c), RDF_TYPE, ent("City", DBO)))
    triples.append((ent("prince", AAT), AAT + "distinguished_from", ent("princess", AAT)))
    triples.append((ent("Willem-Alexander"), DBO + "title", ent("prince", AAT)))

    lines = ["# Synthetic linked-data fixture for the golden end-to-end run."]
    for s, p, o in triples:
        lines.append(f"<{s}> <{p}> <{o}> .")
    for iri, lab in sorted(labels.items()):
        lines.append(f'<{iri}> <{LABEL}> "{lab}"@en .')
    for local, extra in sorted(EXTRA_LABELS.items()):
        for lab in extra:
            lines.append(f'<{DBR + local}> <{LABEL}> "{lab}"@nl .')
    return "\n".join(lines) + "\n"


def q(local):
    return label_of(local).lower()


def session_script(rng):
    """One session's query list, built from a randomly chosen strategy."""
    kind = rng.choice([
        "sibling", "sibling", "spouse", "spouse", "spouse",
        "term", "term", "lexical", "same", "art", "shift", "mixed",
    ])
    if kind == "sibling":
        team = rng.choice([ENGLAND, ENGLAND, NETHERLANDS])
        return [q(p) for p in rng.sample(team, rng.randint(2, min(4, len(team))))]
    if kind == "spouse":
        a, b = rng.choice(SPOUSES + PARTNERS)
        return [q(a), q(b)] + ([q(a) + " wedding"] if rng.random() < 0.5 else [])
    if kind == "term":
        base = rng.choice(["beckham", "monet", "amsterdam", "federer"])
        extra = rng.choice(["milan", "2010", "portrait", "canal"])
        return rng.choice([[base, base + " " + extra, base], [base + " " + extra, base, base + " " + extra + " photo"]])
    if kind == "lexical":
        word = rng.choice(["painting", "sunflower", "canal", "prince"])
        return [word, word + "s"] + (["princess"] if word == "prince" else [])
    if kind == "same":
        return rng.choice([["gent", "gand"], ["ghent", "gent", "gand"], ["monet", "claude monet"]])
    if kind == "art":
        movement = rng.choice(list(MOVEMENTS))
        artists = MOVEMENTS[movement]
        return [q(a) for a in rng.sample(artists, 2)] + [q(movement).lower()]
    if kind == "shift":
        return [rng.choice(["holiday photos", "queen beatrix", "flood 1953"]), q(rng.choice(TENNIS))]
    players = rng.sample(TENNIS, 2)
    return [q(players[0]), q(players[0]), q(players[1])]


def build_log(n_sessions=50, seed=7):
    rng = random.Random(seed)
    start = datetime(2010, 3, 1, 8, 0, 0, tzinfo=timezone.utc)
    lines = ["# timestamp\tuser_key\tkind\tpayload"]
    for i in range(n_sessions):
        user = f"user{i // 2:02d}"
        t = start + timedelta(hours=i)
        if i % 17 == 3:
            lines.append(f"{t.isoformat()}\t{user}\tC\tstray-{i}")
            t += timedelta(seconds=5)
        for j, query in enumerate(session_script(rng)):
            lines.append(f"{t.isoformat()}\t{user}\tQ\t{query}")
            if rng.random() < 0.45:
                for k in range(rng.randint(1, 2)):
                    t += timedelta(seconds=rng.randint(5, 60))
                    lines.append(f"{t.isoformat()}\t{user}\tC\timg-{i:02d}-{j}-{k}")
            t += timedelta(seconds=rng.randint(20, 300))
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    (HERE / "golden_kb.nt").write_text(build_kb(), encoding="utf-8")
    (HERE / "golden_log.tsv").write_text(build_log(), encoding="utf-8")
    print("wrote golden_kb.nt and golden_log.tsv")
