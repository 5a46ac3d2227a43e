"""Temperature not explicitly set: sampling behavior rides the provider default."""

from openai import OpenAI

client = OpenAI(timeout=30, max_retries=2)
messages = [
    {"role": "system", "content": "You are a precise release-notes summarizer."},
    {"role": "user", "content": "Summarize the release notes for version 2.4."},
]

response = client.chat.completions.create(
    model="gpt-4o-2024-11-20",
    messages=messages,
    max_tokens=256,
)
print(response.choices[0].message.content)
