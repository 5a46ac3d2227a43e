"""No structured output: free-form text is parsed as JSON downstream."""

import json

from openai import OpenAI

client = OpenAI(timeout=30, max_retries=2)
messages = [
    {"role": "system", "content": "Return a JSON object with keys name and score."},
    {"role": "user", "content": "Grade this essay: The mitochondria is the powerhouse."},
]

response = client.chat.completions.create(
    model="gpt-4o-2024-11-20",
    messages=messages,
    max_tokens=256,
    temperature=0.0,
)
result = json.loads(response.choices[0].message.content)
print(result["name"], result["score"])
