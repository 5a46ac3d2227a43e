# Entity extraction that parses model output as JSON. Planted: one call
# carrying NSM (no system message), NSO (parsed output without a schema),
# and TNES (no temperature). The model is pinned and bounds are set.

import json

from openai import OpenAI

client = OpenAI(timeout=10.0, max_retries=2)


def extract_entities(text):
    response = client.chat.completions.create(
        model="gpt-4o-2024-08-06",
        messages=[{"role": "user", "content": "List the entities as JSON: " + text}],
        max_tokens=400,
    )
    return json.loads(response.choices[0].message.content)
