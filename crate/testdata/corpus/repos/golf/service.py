# Model and temperature come from the environment and messages are built at
# runtime: dynamic values, so nothing is provably absent. Planted: zero
# findings in the default (non-strict) run.

import os

from openai import OpenAI

client = OpenAI(timeout=15.0, max_retries=1)


def build_messages(prompt):
    return [
        {"role": "system", "content": os.environ.get("APP_PERSONA", "Be brief.")},
        {"role": "user", "content": prompt},
    ]


def run(prompt):
    response = client.chat.completions.create(
        model=os.environ["APP_MODEL"],
        messages=build_messages(prompt),
        max_tokens=512,
        temperature=float(os.environ.get("APP_TEMP", "0.2")),
    )
    return response.choices[0].message.content
