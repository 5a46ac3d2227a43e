"""Structured output enforced: a JSON schema is bound via response_format."""

import json

from openai import OpenAI

client = OpenAI(timeout=30, max_retries=2)
result_schema = {
    "type": "object",
    "properties": {"name": {"type": "string"}, "score": {"type": "number"}},
    "required": ["name", "score"],
}
messages = [
    {"role": "system", "content": "Return a JSON object with keys name and score."},
    {"role": "user", "content": "Grade this essay: The mitochondria is the powerhouse."},
]

response = client.chat.completions.create(
    model="gpt-4o-2024-11-20",
    messages=messages,
    response_format={
        "type": "json_schema",
        "json_schema": {"name": "Result", "schema": result_schema},
    },
    max_tokens=256,
    temperature=0.0,
)
result = json.loads(response.choices[0].message.content)
print(result["name"], result["score"])
