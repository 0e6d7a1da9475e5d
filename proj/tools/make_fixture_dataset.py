#!/usr/bin/env python3
"""Regenerates the bundled fixture dataset under tests/fixtures/.

The fixture is a miniature BEIR-layout benchmark (corpus.jsonl, queries.jsonl,
qrels/test.tsv) plus an ontology snapshot sized so the whole pipeline runs
offline against the canned mock backend. Output is deterministic; run from the
repository root:

    python3 tools/make_fixture_dataset.py
"""

import json
import os

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(ROOT, "tests", "fixtures")
MINIDATA = os.path.join(FIXTURES, "minidata")

SNAPSHOT = [
    {
        "cui": "C0011849",
        "name": "Diabetes Mellitus",
        "definitions": [
            {"text": "A heterogeneous group of disorders characterized by hyperglycemia "
                     "and glucose intolerance.", "source": "MSH"},
            {"text": "A metabolic disorder characterized by abnormally high blood sugar "
                     "levels due to diminished production of insulin or insulin "
                     "resistance.", "source": "NCI"},
        ],
        "relations": [
            {"to": "C0011860", "to_name": "Type 2 Diabetes", "label": "CHD"},
            {"to": "C0020456", "to_name": "Hyperglycemia", "label": "RO"},
            {"to": "C0025517", "to_name": "Metabolic Diseases", "label": "PAR"},
            {"to": "C0936214", "to_name": "Glucose tolerance test", "label": "AQ"},
        ],
    },
    {
        "cui": "C0678222",
        "name": "Carcinoma of breast",
        "definitions": [
            {"text": "A malignant neoplasm arising from breast epithelial cells.",
             "source": "NCI"},
            {"text": "malignant neoplasm of the breast tissue.", "source": "CSP"},
        ],
        "relations": [
            {"to": "C1134719", "to_name": "Infiltrating duct carcinoma", "label": "PAR"},
            {"to": "C0006142", "to_name": "Breast cancer", "label": "SY"},
            {"to": "C0025202", "to_name": "Melanoma", "label": "SIB"},
        ],
        "aliases": ["Breast Carcinoma"],
    },
    {
        "cui": "C0004096",
        "name": "Asthma",
        "definitions": [
            {"text": "A form of bronchial disorder with three distinct components: "
                     "airway hyper-responsiveness, airway inflammation, and intermittent "
                     "airway obstruction.", "source": "MSH"},
            {"text": "respiratory disorder marked by recurring episodes of paroxysmal "
                     "dyspnea and wheezing.", "source": "CSP"},
        ],
        "relations": [
            {"to": "C0006266", "to_name": "Bronchospasm", "label": "RO"},
            {"to": "C0155877", "to_name": "Allergic asthma", "label": "CHD"},
            {"to": "C0024109", "to_name": "Lung", "label": "QB"},
        ],
    },
    {
        "cui": "C0020538",
        "name": "Hypertension",
        "definitions": [
            {"text": "Persistently high systemic arterial blood pressure.", "source": "MSH"},
            {"text": "A disorder characterized by a pathological increase in blood "
                     "pressure.", "source": "SNOMEDCT_US"},
        ],
        "relations": [
            {"to": "C0005823", "to_name": "Blood Pressure", "label": "RO"},
            {"to": "C0020542", "to_name": "Pulmonary Hypertension", "label": "CHD"},
        ],
        "aliases": ["High Blood Pressure"],
    },
    {
        "cui": "C0149931",
        "name": "Migraine",
        "definitions": [
            {"text": "A class of disabling primary headache disorders, characterized by "
                     "recurrent unilateral pulsatile headaches.", "source": "MSH"},
        ],
        "relations": [
            {"to": "C0018681", "to_name": "Headache", "label": "PAR"},
            {"to": "C0042401", "to_name": "Vasodilation", "label": "RO:has_associated_morphology"},
        ],
    },
    {
        "cui": "C0021400",
        "name": "Influenza",
        "definitions": [
            {"text": "An acute viral infection in humans involving the respiratory "
                     "tract.", "source": "MSH"},
            {"text": "An acute infectious disease of the respiratory tract caused by "
                     "influenza viruses.", "source": "NCI"},
        ],
        "relations": [
            {"to": "C2062441", "to_name": "Influenza A", "label": "CHD"},
            {"to": "C0042769", "to_name": "Virus Diseases", "label": "PAR"},
        ],
        "aliases": ["Flu"],
    },
    {
        "cui": "C0002871",
        "name": "Anemia",
        "definitions": [
            {"text": "A reduction in the number of circulating erythrocytes or in the "
                     "quantity of hemoglobin.", "source": "MSH"},
        ],
        "relations": [
            {"to": "C0240066", "to_name": "Iron deficiency", "label": "RO"},
            {"to": "C0018939", "to_name": "Hematologic Diseases", "label": "PAR"},
        ],
    },
    {
        "cui": "C0028754",
        "name": "Obesity",
        "definitions": [
            {"text": "A status with body weight that is grossly above the acceptable or "
                     "desirable weight.", "source": "MSH"},
            {"text": "excessive accumulation of body fat.", "source": "CSP"},
        ],
        "relations": [
            {"to": "C0005893", "to_name": "Body mass index", "label": "RO"},
            {"to": "C0028756", "to_name": "Morbid obesity", "label": "CHD"},
        ],
    },
    {
        "cui": "C0029456",
        "name": "Osteoporosis",
        "definitions": [
            {"text": "Reduction of bone mass without alteration in the composition of "
                     "bone.", "source": "MSH"},
            {"text": "A condition of reduced bone mass, with decreased cortical "
                     "thickness and a decrease in the number and size of the trabeculae "
                     "of cancellous bone.", "source": "NCI"},
        ],
        "relations": [
            {"to": "C0005938", "to_name": "Bone Density", "label": "RO"},
            {"to": "C0029453", "to_name": "Osteopenia", "label": "PAR"},
        ],
    },
    {
        "cui": "C0013884",
        "name": "Lymphatic Filariasis",
        "definitions": [
            {"text": "A clinical disorder that is caused by obstruction of the lymphatic "
                     "system years after filarial infection. It is characterized by "
                     "painful and profound lymphedema, resulting in significant swelling "
                     "(elephantiasis) of extremities and genitals.", "source": "NCI"},
            {"text": "Parasitic infestation of the human lymphatic system by WUCHERERIA "
                     "BANCROFTI or BRUGIA MALAYI. It is also called lymphatic "
                     "filariasis.", "source": "MSH"},
        ],
        "relations": [
            {"to": "C0016085", "to_name": "Filariasis", "label": "PAR"},
            {"to": "C0013882", "to_name": "Elephantiasis", "label": "SY"},
        ],
    },
]

# (id, title, body) - three to five documents per topic plus distractors.
DOCS = [
    ("MED-001", "Glycemic control in diabetes mellitus",
     "Diabetes mellitus management requires monitoring blood sugar and insulin dosing. "
     "Glucose intolerance and hyperglycemia respond to diet, exercise, and metformin."),
    ("MED-002", "Type 2 diabetes and insulin resistance",
     "Type 2 diabetes is a metabolic disorder with insulin resistance and progressive "
     "beta cell failure. Weight loss improves glycemic control."),
    ("MED-003", "Diabetic diet planning",
     "A diabetes diet emphasizes vegetables, whole grains, and portion control to keep "
     "blood sugar stable and reduce hyperglycemia episodes."),
    ("MED-004", "Diabetes and cardiovascular comorbidity",
     "Patients with diabetes mellitus frequently develop hypertension; controlling both "
     "blood pressure and glucose lowers cardiovascular risk."),
    ("MED-005", "Breast carcinoma screening",
     "Early detection of breast carcinoma by mammography improves outcomes. Infiltrating "
     "duct carcinoma is the most common histology of breast cancer."),
    ("MED-006", "Adjuvant therapy for breast cancer",
     "Breast cancer treatment combines surgery, radiation, and chemotherapy depending on "
     "the carcinoma stage and receptor status."),
    ("MED-007", "Malignant neoplasm pathology",
     "A malignant neoplasm invades surrounding tissue; carcinoma of breast spreads first "
     "to axillary lymph nodes."),
    ("MED-008", "Asthma inhaler technique",
     "Asthma control depends on correct inhaler technique; bronchospasm and wheezing "
     "improve with inhaled corticosteroids and bronchodilators."),
    ("MED-009", "Exercise induced bronchospasm",
     "Exercise induced bronchospasm affects athletes with airway hyper-responsiveness; "
     "warm-up routines and beta agonists prevent attacks."),
    ("MED-010", "Allergic asthma triggers",
     "Allergic asthma flares after dust mite, pollen, and pet dander exposure; airway "
     "inflammation drives intermittent airway obstruction."),
    ("MED-011", "Hypertension lifestyle management",
     "Hypertension improves with sodium restriction, exercise, and weight loss before "
     "medication; home blood pressure readings guide therapy."),
    ("MED-012", "Blood pressure measurement accuracy",
     "Accurate blood pressure measurement requires proper cuff size and rest; high "
     "readings should be confirmed before diagnosing hypertension."),
    ("MED-013", "DASH diet for high blood pressure",
     "The DASH diet lowers high blood pressure through fruits, vegetables, and low-fat "
     "dairy; it is first-line for mild hypertension."),
    ("MED-014", "Migraine prophylaxis options",
     "Migraine prevention includes beta blockers, topiramate, and CGRP antibodies; "
     "recurrent pulsatile headache frequency drops with prophylaxis."),
    ("MED-015", "Headache differential diagnosis",
     "Distinguishing migraine from tension headache and cluster headache guides therapy; "
     "unilateral throbbing pain with aura suggests migraine."),
    ("MED-016", "Influenza vaccination effectiveness",
     "Annual influenza vaccination reduces flu hospitalization; vaccine effectiveness "
     "varies with circulating influenza A strains."),
    ("MED-017", "Flu season precautions",
     "During flu season, hand hygiene and masks limit influenza transmission in the "
     "respiratory tract; antivirals shorten illness."),
    ("MED-018", "Iron deficiency anemia treatment",
     "Iron deficiency anemia responds to oral iron supplementation; hemoglobin and "
     "ferritin monitoring confirms erythrocyte recovery."),
    ("MED-019", "Anemia of chronic disease",
     "Anemia of chronic disease involves hepcidin-mediated iron sequestration and "
     "reduced circulating erythrocytes despite adequate stores."),
    ("MED-020", "Childhood obesity prevention",
     "Childhood obesity prevention combines school nutrition, activity programs, and "
     "family counseling; body mass index tracking identifies risk early."),
    ("MED-021", "Bariatric surgery for morbid obesity",
     "Morbid obesity unresponsive to lifestyle change may warrant bariatric surgery, "
     "which durably reduces body weight and body fat."),
    ("MED-022", "Osteoporosis screening after menopause",
     "Postmenopausal osteoporosis screening uses bone density DXA scans; bisphosphonates "
     "reduce fracture risk when bone mass is low."),
    ("MED-023", "Calcium and vitamin D for bone health",
     "Calcium and vitamin D supplementation supports bone density and slows osteoporosis "
     "progression in older adults."),
    ("MED-024", "Lymphatic filariasis elimination programs",
     "Mass drug administration against lymphatic filariasis interrupts transmission of "
     "Wuchereria bancrofti; lymphedema management relieves elephantiasis."),
    ("MED-025", "Filariasis vector control",
     "Mosquito vector control reduces filariasis transmission; bed nets and larval "
     "source management protect endemic communities."),
    ("MED-026", "Hyperglycemia in hospitalized patients",
     "Inpatient hyperglycemia management uses basal-bolus insulin; uncontrolled blood "
     "sugar worsens infection outcomes."),
    ("MED-027", "Pulmonary hypertension overview",
     "Pulmonary hypertension raises pressure in lung arteries, causing dyspnea; right "
     "heart catheterization confirms the diagnosis."),
    ("MED-028", "Metabolic syndrome components",
     "Metabolic syndrome clusters obesity, hypertension, dyslipidemia, and impaired "
     "glucose tolerance, raising diabetes risk."),
    ("MED-029", "Vegetable intake and cancer risk",
     "High vegetable intake is associated with modestly lower cancer incidence in "
     "cohort studies of diet and malignant neoplasm risk."),
    ("MED-030", "Community gardening and nutrition",
     "Community gardening programs increase vegetable consumption; tomato plants need "
     "regular watering and full sun."),
    ("MED-031", "Native plant landscaping",
     "Native plant landscaping conserves water and supports pollinators; prairie "
     "species tolerate drought."),
    ("MED-032", "Home vegetable garden pest control",
     "Integrated pest management for tomato plants uses crop rotation, companion "
     "planting, and beneficial insects instead of pesticides."),
    ("MED-033", "Wheezing in toddlers",
     "Recurrent wheezing in toddlers often precedes asthma; viral bronchiolitis is the "
     "usual trigger in the first two years."),
    ("MED-034", "Gestational diabetes screening",
     "Gestational diabetes screening with glucose tolerance testing identifies "
     "hyperglycemia in pregnancy; insulin is used when diet fails."),
    ("MED-035", "Hypertensive emergency management",
     "Hypertensive emergency with end-organ damage requires intravenous blood pressure "
     "reduction in intensive care."),
    ("MED-036", "Influenza antiviral therapy",
     "Neuraminidase inhibitors shorten influenza when started within 48 hours of "
     "symptom onset; resistance remains uncommon."),
    ("MED-037", "Anemia screening in pregnancy",
     "Routine prenatal screening detects anemia; iron deficiency is the most common "
     "cause and responds to supplementation."),
    ("MED-038", "Obesity and joint disease",
     "Obesity accelerates knee osteoarthritis; weight loss of ten percent reduces joint "
     "pain and improves function."),
    ("MED-039", "Bone fracture risk calculators",
     "FRAX combines bone density with clinical factors to estimate fracture risk and "
     "guide osteoporosis treatment thresholds."),
    ("MED-040", "Elephantiasis care in endemic regions",
     "Limb hygiene, exercise, and compression reduce elephantiasis disability in "
     "lymphatic filariasis patients."),
    ("MED-041", "Migraine trigger diaries",
     "Keeping a migraine diary identifies triggers such as sleep loss, alcohol, and "
     "skipped meals; trigger avoidance cuts headache days."),
    ("MED-042", "Breast cancer genetics",
     "BRCA1 and BRCA2 mutations raise breast carcinoma risk; genetic counseling guides "
     "screening and prevention for carriers."),
    ("MED-043", "Seasonal allergy or flu",
     "Seasonal allergies cause sneezing without fever, while influenza brings abrupt "
     "fever, myalgia, and respiratory symptoms."),
    ("MED-044", "Understanding blood sugar logs",
     "Structured blood sugar logs reveal glucose patterns that guide diabetes therapy "
     "adjustments between visits."),
    ("MED-045", "Asthma action plans",
     "Written asthma action plans define green, yellow, and red zones with medication "
     "steps tied to peak flow readings."),
]

QUERIES = [
    ("q01", "managing Diabetes Mellitus with diet"),
    ("q02", "early signs of Breast Carcinoma"),
    ("q03", "Asthma attack prevention"),
    ("q04", "treating Hypertension without medication"),
    ("q05", "chronic Migraine relief options"),
    ("q06", "Influenza vaccine effectiveness"),
    ("q07", "dietary iron for Anemia"),
    ("q08", "childhood Obesity trends"),
    ("q09", "preventing Osteoporosis after menopause"),
    ("q10", "Lymphatic Filariasis transmission"),
    ("q11", "Diabetes Mellitus and Hypertension together"),
    ("q12", "Veggies vs. Cancer"),
    ("q13", "Native Americans"),
    ("q14", "gardening tips for tomato plants"),
    ("q15", "Type 2 Diabetes insulin resistance"),
    ("q16", "Bronchospasm during exercise"),
    ("q17", "High Blood Pressure readings at home"),
    ("q18", "Flu season Influenza precautions"),
    ("q19", "Obesity and Diabetes Mellitus risk factors"),
    ("q20", "best Hypertension diet plan"),
]

QRELS = {
    "q01": {"MED-001": 2, "MED-003": 2, "MED-044": 1, "MED-034": 1, "MED-004": 1},
    "q02": {"MED-005": 2, "MED-042": 1, "MED-006": 1, "MED-007": 1},
    "q03": {"MED-008": 2, "MED-045": 2, "MED-010": 1, "MED-033": 1},
    "q04": {"MED-011": 2, "MED-013": 2, "MED-012": 1},
    "q05": {"MED-014": 2, "MED-041": 2, "MED-015": 1},
    "q06": {"MED-016": 2, "MED-036": 1, "MED-043": 1},
    "q07": {"MED-018": 2, "MED-037": 1, "MED-019": 1},
    "q08": {"MED-020": 2, "MED-021": 1, "MED-038": 1, "MED-028": 0},
    "q09": {"MED-022": 2, "MED-023": 1, "MED-039": 1},
    "q10": {"MED-024": 2, "MED-025": 1, "MED-040": 1},
    "q11": {"MED-004": 2, "MED-028": 1, "MED-001": 1, "MED-011": 1},
    "q12": {"MED-029": 2, "MED-030": 0},
    "q13": {"MED-031": 0},  # judged, zero relevant: scores 0 and is still averaged
    "q14": {"MED-030": 1, "MED-032": 2, "MED-031": 0},
    "q15": {"MED-002": 2, "MED-001": 1, "MED-026": 1},
    "q16": {"MED-009": 2, "MED-008": 1},
    "q17": {"MED-012": 2, "MED-013": 1, "MED-011": 1, "MED-035": 1},
    "q18": {"MED-017": 2, "MED-016": 1, "MED-043": 1},
    "q19": {"MED-028": 2, "MED-004": 1, "MED-020": 1},
    "q20": {"MED-013": 2, "MED-011": 1},
}


def jsonl(records):
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)


def main():
    os.makedirs(os.path.join(MINIDATA, "qrels"), exist_ok=True)

    with open(os.path.join(MINIDATA, "corpus.jsonl"), "w", encoding="utf-8") as fh:
        fh.write(jsonl([{"_id": d, "title": t, "text": b} for d, t, b in DOCS]))

    with open(os.path.join(MINIDATA, "queries.jsonl"), "w", encoding="utf-8") as fh:
        fh.write(jsonl([{"_id": q, "text": t} for q, t in QUERIES]))

    with open(os.path.join(MINIDATA, "qrels", "test.tsv"), "w", encoding="utf-8") as fh:
        fh.write("query-id\tcorpus-id\tscore\n")
        for qid, _ in QUERIES:
            for did in sorted(QRELS.get(qid, {})):
                fh.write(f"{qid}\t{did}\t{QRELS[qid][did]}\n")

    with open(os.path.join(FIXTURES, "snapshot.jsonl"), "w", encoding="utf-8") as fh:
        fh.write(jsonl(SNAPSHOT))

    print(f"wrote {len(DOCS)} docs, {len(QUERIES)} queries, "
          f"{sum(len(v) for v in QRELS.values())} judgments, "
          f"{len(SNAPSHOT)} snapshot concepts")


if __name__ == "__main__":
    main()
