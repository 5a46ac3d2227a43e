"""No system message: only a user turn shapes the model's behavior."""

from openai import OpenAI

client = OpenAI(timeout=30, max_retries=2)

response = client.chat.completions.create(
    model="gpt-4o-2024-11-20",
    messages=[{"role": "user", "content": "Explain recursion with an example"}],
    max_tokens=256,
    temperature=0.2,
)
print(response.choices[0].message.content)
