"""Generate the 100-article French economic news fixture.

Usage: python3 scripts/gen_corpus.py > crates/service/tests/data/corpus100.json
"""

import json
import random
from datetime import date, timedelta

rng = random.Random(2011)

CITIES = ["Dijon", "Beaune", "Chalon-sur-Saône", "Auxerre", "Mâcon"]
KNOWN = ["Amora", "Urgo", "Laboratoires Urgo", "Banque de Bourgogne", "Grand Dijon"]
NEW = ["Vinalia SARL", "Bourgogne Fibre SAS", "Cassis Nord SA", "Moutarde Royale SARL",
       "Optel SAS", "Charpente Morvan SARL", "Solaris SA", "Vitalis SA"]
EVENTS = [
    ("{org} annonce le rachat de {new}", "La reprise a été signée à {city}."),
    ("Acquisition : {org} s'offre {new}", "L'acquisition renforce sa présence à {city}."),
    ("{org} investit à {city}", "Un investissement de {n} 000 € pour une nouvelle usine."),
    ("{new} ouvre une usine à {city}", "Le site de production créera {m} emplois."),
    ("Recrutement chez {org}", "L'entreprise recrute {m} personnes à {city}."),
    ("Plan social chez {new}", "Des licenciements sont annoncés à {city}."),
    ("{new} en redressement judiciaire", "Le tribunal de {city} a ouvert la procédure."),
    ("Levée de fonds pour {new}", "La jeune pousse de {city} lève {n} 000 euros."),
]
SECTORS = [
    "Le secteur du vin reste dynamique en Bourgogne.",
    "La filière agroalimentaire se porte bien.",
    "Les télécoms misent sur la fibre optique.",
    "Le BTP profite du chantier du tramway.",
    "L'énergie photovoltaïque progresse.",
    "La santé et l'industrie pharmaceutique recrutent.",
    "L'équipementier automobile diversifie ses activités.",
    "La LGV et le TGV Rhin-Rhône rapprochent la région de Paris.",
    "Le très haut débit arrive dans les zones rurales.",
]
MONTHS = ["janvier", "février", "mars", "avril", "mai", "juin", "juillet",
          "août", "septembre", "octobre", "novembre", "décembre"]

start = date(2011, 1, 10)
articles = []
for i in range(100):
    day = start + timedelta(days=i % 5)
    title_t, body_t = rng.choice(EVENTS)
    fill = dict(org=rng.choice(KNOWN), new=rng.choice(NEW), city=rng.choice(CITIES),
                n=rng.randint(2, 900), m=rng.randint(5, 300))
    sentences = [body_t.format(**fill), rng.choice(SECTORS)]
    if rng.random() < 0.5:
        d = day - timedelta(days=rng.randint(0, 40))
        sentences.append(f"Annonce faite le {d.day} {MONTHS[d.month - 1]} {d.year}.")
    rng.shuffle(sentences)
    articles.append({
        "id": f"art{i:03d}",
        "title": title_t.format(**fill),
        "body": " ".join(sentences),
        "publishedDate": day.isoformat(),
    })

print(json.dumps(articles, ensure_ascii=False, indent=2))
